"""Parameter storage, seeded initialization, freezing, weight bundles.

A weight bundle is a directory holding ``manifest.json`` (layer name ->
shape/dtype/file) plus one ``.npy`` per array; the same container backs
pretrained encoder weights and training checkpoints, so converters from any
framework only need to emit this layout (documented in the README).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, WeightLoadError
from .graph import NetworkGraph

BUNDLE_VERSION = 1


@dataclass
class ParameterSet:
    """Named arrays plus non-learned buffers and the frozen-name set."""

    params: dict[str, np.ndarray]
    buffers: dict[str, np.ndarray] = field(default_factory=dict)
    frozen: frozenset[str] = frozenset()

    def trainable_names(self) -> list[str]:
        return [n for n in self.params if n not in self.frozen]

    def copy(self) -> "ParameterSet":
        return ParameterSet(
            params={k: v.copy() for k, v in self.params.items()},
            buffers={k: v.copy() for k, v in self.buffers.items()},
            frozen=self.frozen,
        )


def init_params(graph: NetworkGraph, seed: int = 0, dtype=np.float32) -> ParameterSet:
    """Seeded fan-in-scaled uniform init.

    Conv kernels draw from U(-sqrt(6/fan_in), +sqrt(6/fan_in)); biases and
    norm betas start at 0, norm gammas at 1.  Draw order follows the graph's
    node order, so a (graph, seed) pair always yields identical arrays.
    """
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    buffers: dict[str, np.ndarray] = {}
    for node in graph.nodes:
        for suffix, shape in node.params.items():
            name = f"{node.name}.{suffix}"
            if suffix == "w":
                fan_in = math.prod(shape[:-1])
                limit = math.sqrt(6.0 / fan_in)
                params[name] = rng.uniform(-limit, limit, size=shape).astype(dtype)
            elif suffix == "gamma":
                params[name] = np.ones(shape, dtype=dtype)
            else:  # biases, betas
                params[name] = np.zeros(shape, dtype=dtype)
        for suffix, shape in node.buffers.items():
            name = f"{node.name}.{suffix}"
            init = np.ones if suffix == "running_var" else np.zeros
            buffers[name] = init(shape, dtype=dtype)
    return ParameterSet(params=params, buffers=buffers,
                        frozen=graph.frozen_param_names())


def apply_pretrained_and_freeze(params: ParameterSet, graph: NetworkGraph,
                                bundle_dir=None, frozen_blocks=None) -> ParameterSet:
    """Load encoder weights from a bundle (if given) and set the frozen set.

    Bundle layer names must match the graph's parameter names; extra bundle
    entries are ignored, shape mismatches abort naming the first bad layer.
    With no bundle the existing (seeded) arrays are kept and only the frozen
    flags change.
    """
    out = params.copy()
    if bundle_dir is not None:
        arrays = load_weight_bundle(bundle_dir)
        for name in sorted(arrays):
            if name not in out.params:
                continue
            have = out.params[name]
            got = arrays[name]
            if tuple(got.shape) != tuple(have.shape):
                raise WeightLoadError(
                    f"layer {name!r}: bundle shape {tuple(got.shape)} "
                    f"does not match model shape {tuple(have.shape)}")
            out.params[name] = got.astype(have.dtype)
    if frozen_blocks is not None and not 0 <= frozen_blocks <= 4:
        raise ConfigurationError(f"frozen_blocks must be in 0..4, got {frozen_blocks}")
    out.frozen = graph.frozen_param_names(frozen_blocks)
    return out


def save_weight_bundle(arrays: dict[str, np.ndarray], bundle_dir,
                       extra_manifest: dict | None = None) -> Path:
    """Write arrays + manifest; byte-deterministic for identical inputs."""
    bundle = Path(bundle_dir)
    (bundle / "arrays").mkdir(parents=True, exist_ok=True)
    manifest = {"format_version": BUNDLE_VERSION, "layers": {}}
    if extra_manifest:
        manifest.update(extra_manifest)
    for i, name in enumerate(sorted(arrays)):
        arr = arrays[name]
        fname = f"arrays/{i:04d}.npy"
        np.save(bundle / fname, arr)
        manifest["layers"][name] = {
            "file": fname, "shape": list(arr.shape), "dtype": str(arr.dtype)}
    with open(bundle / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return bundle


def read_bundle_manifest(bundle_dir) -> dict:
    path = Path(bundle_dir) / "manifest.json"
    if not path.is_file():
        raise WeightLoadError(f"no manifest.json in bundle {bundle_dir}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise WeightLoadError(f"corrupt manifest in {bundle_dir}: {e}") from e
    version = manifest.get("format_version")
    if version != BUNDLE_VERSION:
        raise WeightLoadError(
            f"bundle {bundle_dir}: format version {version!r} not supported "
            f"(this build reads version {BUNDLE_VERSION})")
    return manifest


def load_weight_bundle(bundle_dir) -> dict[str, np.ndarray]:
    bundle = Path(bundle_dir)
    manifest = read_bundle_manifest(bundle)
    arrays = {}
    for name, entry in manifest["layers"].items():
        arr = np.load(bundle / entry["file"])
        if list(arr.shape) != list(entry["shape"]):
            raise WeightLoadError(
                f"layer {name!r}: file shape {list(arr.shape)} disagrees "
                f"with manifest {entry['shape']}")
        arrays[name] = arr
    return arrays
