"""Checkpoints: model config + parameters + best-epoch metadata.

Stored as a weight-bundle directory (manifest.json + arrays/*.npy) with the
parameter/buffer arrays prefixed ``param/`` and ``buffer/``; round-trips are
bit-exact and byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import CheckpointError, WeightLoadError
from ..model.config import ModelConfig
from ..model.params import ParameterSet, load_weight_bundle, read_bundle_manifest, \
    save_weight_bundle

CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    version: int
    config: ModelConfig
    params: ParameterSet
    best_epoch: int | None = None
    val_loss: float | None = None


def save_checkpoint(pset: ParameterSet, config: ModelConfig, path,
                    best_epoch=None, val_loss=None) -> Path:
    arrays = {f"param/{k}": v for k, v in pset.params.items()}
    arrays.update({f"buffer/{k}": v for k, v in pset.buffers.items()})
    extra = {
        "checkpoint_version": CHECKPOINT_VERSION,
        "model_config": config.to_dict(),
        "frozen": sorted(pset.frozen),
        "best_epoch": best_epoch,
        "val_loss": val_loss,
    }
    return save_weight_bundle(arrays, path, extra_manifest=extra)


def load_checkpoint(path) -> Checkpoint:
    try:
        manifest = read_bundle_manifest(path)
        arrays = load_weight_bundle(path)
    except WeightLoadError as e:
        raise CheckpointError(str(e)) from e
    version = manifest.get("checkpoint_version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"checkpoint {path}: version {version!r} not supported "
            f"(this build reads version {CHECKPOINT_VERSION})")
    if "model_config" not in manifest:
        raise CheckpointError(f"checkpoint {path}: manifest lacks model_config")
    config = ModelConfig.from_dict(manifest["model_config"])
    params = {k[len("param/"):]: v for k, v in arrays.items()
              if k.startswith("param/")}
    buffers = {k[len("buffer/"):]: v for k, v in arrays.items()
               if k.startswith("buffer/")}
    pset = ParameterSet(params=params, buffers=buffers,
                        frozen=frozenset(manifest.get("frozen", ())))
    return Checkpoint(version=version, config=config, params=pset,
                      best_epoch=manifest.get("best_epoch"),
                      val_loss=manifest.get("val_loss"))
