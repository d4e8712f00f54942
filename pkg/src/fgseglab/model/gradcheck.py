"""Central-difference gradient checking for whole-network training losses.

Dropout should be disabled in the checked config (set the rates to 0); batch
and instance norm run in train mode so their statistics stay on the
differentiable path.

Notes on accuracy: the finite-difference reference can run on a float64
shadow copy of the parameters (``fd_dtype``) so the comparison isolates the
analytic implementation's error; the step is re-measured after the storage
round-trip to remove quantization bias.  At coarse steps a few coordinates
show pure truncation bias (the loss has curvature and ReLU kinks inside the
+/-h window); re-probing those at a smaller step separates step artifacts
from genuine gradient errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..train.loss import weighted_bce_with_grad
from .executor import run_backward, run_forward
from .graph import NetworkGraph
from .params import ParameterSet


@dataclass
class GradCheckResult:
    name: str
    index: tuple
    analytic: float
    numeric: float
    rel_error: float


def _loss_only(graph, pset, images, masks, weight):
    acts, _ = run_forward(graph, pset, images, mode="train", rng=None)
    probs = acts[graph.taps["probabilities"]][..., 0]
    loss, _ = weighted_bce_with_grad(probs, masks, weight, need_grad=False)
    return float(loss)


def analytic_gradients(graph, pset, images, masks, weight):
    acts, caches = run_forward(graph, pset, images, mode="train", rng=None,
                               keep_caches=True)
    probs = acts[graph.taps["probabilities"]][..., 0]
    loss, dprobs = weighted_bce_with_grad(probs, masks, weight)
    grads = run_backward(graph, pset, acts, caches, dprobs[..., None])
    return float(loss), grads


def sample_coordinates(pset: ParameterSet, n: int, seed: int):
    """Uniformly sample coordinates across all trainable tensors."""
    names = pset.trainable_names()
    sizes = np.array([pset.params[n_].size for n_ in names])
    bounds = np.cumsum(sizes)
    rng = np.random.default_rng(seed)
    flats = rng.choice(int(sizes.sum()), size=min(n, int(sizes.sum())),
                       replace=False)
    coords = []
    for flat in sorted(int(f) for f in flats):
        ti = int(np.searchsorted(bounds, flat, side="right"))
        offset = flat - (bounds[ti - 1] if ti > 0 else 0)
        name = names[ti]
        coords.append((name, np.unravel_index(offset, pset.params[name].shape)))
    return coords


def check_gradients(graph: NetworkGraph, pset: ParameterSet,
                    images: np.ndarray, masks: np.ndarray, weight: float = 2.0,
                    n_samples: int = 60, step: float = 1e-3, seed: int = 0,
                    rel_floor: float = 1e-2, fd_dtype=None,
                    coords=None) -> list[GradCheckResult]:
    """Compare analytic parameter gradients against central differences.

    ``coords`` (a list of (name, index)) overrides random sampling;
    ``fd_dtype`` evaluates the difference quotient on a cast copy of the
    parameters.  Relative error uses max(|analytic|, |numeric|, rel_floor).
    """
    _, grads = analytic_gradients(graph, pset, images, masks, weight)

    if fd_dtype is None:
        fd_pset, fd_images = pset, images
    else:
        fd_pset = ParameterSet(
            params={k: v.astype(fd_dtype) for k, v in pset.params.items()},
            buffers={k: v.astype(fd_dtype) for k, v in pset.buffers.items()},
            frozen=pset.frozen)
        fd_images = images.astype(fd_dtype)

    if coords is None:
        coords = sample_coordinates(pset, n_samples, seed)

    results = []
    for name, idx in coords:
        arr = fd_pset.params[name]
        orig = arr[idx]
        arr[idx] = orig + step
        theta_hi = float(arr[idx])
        loss_hi = _loss_only(graph, fd_pset, fd_images, masks, weight)
        arr[idx] = orig - step
        theta_lo = float(arr[idx])
        loss_lo = _loss_only(graph, fd_pset, fd_images, masks, weight)
        arr[idx] = orig

        numeric = (loss_hi - loss_lo) / (theta_hi - theta_lo)
        analytic = float(grads[name][idx])
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), rel_floor)
        results.append(GradCheckResult(name=name, index=idx, analytic=analytic,
                                       numeric=numeric, rel_error=rel))
    return results
