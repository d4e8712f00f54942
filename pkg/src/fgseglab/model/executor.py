"""Forward and backward execution of a NetworkGraph.

``run_forward`` walks the node list once (it is already topologically
ordered) and keeps per-node caches so ``run_backward`` can replay it in
reverse.  Inference is deterministic: dropout only fires in train mode, and
batch norm switches to its running statistics outside of it.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from . import ops
from .graph import NetworkGraph, Node
from .params import ParameterSet


def _node_params(node: Node, pset: ParameterSet):
    return {suffix: pset.params[f"{node.name}.{suffix}"] for suffix in node.params}


def run_forward(graph: NetworkGraph, pset: ParameterSet, images: np.ndarray,
                mode: str = "eval", rng: np.random.Generator | None = None,
                keep_caches: bool = False):
    """Execute the graph; returns (activations, caches).

    ``images`` is (N, S, S, 3) with S = config.input_size, values in [0, 1].
    """
    s = graph.input_size
    images = np.asarray(images)
    if images.ndim != 4 or images.shape[1:] != (s, s, 3):
        raise DimensionError(
            f"expected input batch of shape (N, {s}, {s}, 3), got {images.shape}")

    acts: dict[str, np.ndarray] = {}
    caches: dict[str, object] = {}
    for node in graph.nodes:
        kind = node.kind
        ins = [acts[i] for i in node.inputs]
        if kind == "input":
            y, cache = images, None
        elif kind == "conv":
            p = _node_params(node, pset)
            y, cache = ops.conv2d_forward(ins[0], p["w"], p["b"],
                                          dilation=node.attrs["dilation"])
        elif kind == "relu":
            y, cache = ops.relu_forward(ins[0])
        elif kind == "maxpool":
            y, cache = ops.maxpool_forward(ins[0], node.attrs["kernel"],
                                           node.attrs["stride"])
        elif kind == "dropout":
            y, cache = ops.dropout_forward(ins[0], node.attrs["rate"],
                                           node.attrs["drop_kind"], mode, rng)
        elif kind == "instance_norm":
            p = _node_params(node, pset)
            y, cache = ops.instance_norm_forward(ins[0], p["gamma"], p["beta"])
        elif kind == "batch_norm":
            p = _node_params(node, pset)
            y, cache = ops.batch_norm_forward(
                ins[0], p["gamma"], p["beta"],
                pset.buffers[f"{node.name}.running_mean"],
                pset.buffers[f"{node.name}.running_var"], mode)
        elif kind == "gap":
            y, cache = ops.gap_forward(ins[0])
        elif kind == "sigmoid":
            y, cache = ops.sigmoid_forward(ins[0])
        elif kind == "concat":
            y, cache = ops.concat_forward(ins)
        elif kind == "add":
            y, cache = ops.add_forward(ins[0], ins[1])
        elif kind == "multiply":
            y, cache = ops.multiply_forward(ins[0], ins[1])
        elif kind in ("upsample", "resize"):
            y, cache = ops.resize_forward(ins[0], node.attrs["out_size"])
        else:  # pragma: no cover - builder emits only the kinds above
            raise ValueError(f"unknown node kind {kind!r}")
        acts[node.name] = y
        if keep_caches:
            caches[node.name] = cache
    return acts, caches


def run_backward(graph: NetworkGraph, pset: ParameterSet,
                 acts: dict, caches: dict, d_output: np.ndarray,
                 output_tap: str = "probabilities") -> dict[str, np.ndarray]:
    """Backpropagate a gradient at ``output_tap`` to every parameter."""
    d_acts: dict[str, np.ndarray] = {graph.taps[output_tap]: d_output}
    grads: dict[str, np.ndarray] = {}

    def push(name, grad):
        if name in d_acts:
            d_acts[name] = d_acts[name] + grad
        else:
            d_acts[name] = grad

    for node in reversed(graph.nodes):
        dy = d_acts.get(node.name)
        if dy is None or node.kind == "input":
            continue
        kind = node.kind
        cache = caches[node.name]
        if kind == "conv":
            dx, dw, db = ops.conv2d_backward(dy, cache)
            grads[f"{node.name}.w"] = dw
            grads[f"{node.name}.b"] = db
            push(node.inputs[0], dx)
        elif kind == "relu":
            push(node.inputs[0], ops.relu_backward(dy, cache))
        elif kind == "maxpool":
            push(node.inputs[0], ops.maxpool_backward(dy, cache))
        elif kind == "dropout":
            push(node.inputs[0], ops.dropout_backward(dy, cache))
        elif kind == "instance_norm":
            dx, dgamma, dbeta = ops.instance_norm_backward(dy, cache)
            grads[f"{node.name}.gamma"] = dgamma
            grads[f"{node.name}.beta"] = dbeta
            push(node.inputs[0], dx)
        elif kind == "batch_norm":
            dx, dgamma, dbeta = ops.batch_norm_backward(dy, cache)
            grads[f"{node.name}.gamma"] = dgamma
            grads[f"{node.name}.beta"] = dbeta
            push(node.inputs[0], dx)
        elif kind == "gap":
            push(node.inputs[0], ops.gap_backward(dy, cache))
        elif kind == "sigmoid":
            push(node.inputs[0], ops.sigmoid_backward(dy, cache))
        elif kind == "concat":
            for inp, dpart in zip(node.inputs, ops.concat_backward(dy, cache)):
                push(inp, dpart)
        elif kind == "add":
            da, db_ = ops.add_backward(dy, cache)
            push(node.inputs[0], da)
            push(node.inputs[1], db_)
        elif kind == "multiply":
            da, db_ = ops.multiply_backward(dy, cache)
            push(node.inputs[0], da)
            push(node.inputs[1], db_)
        elif kind in ("upsample", "resize"):
            push(node.inputs[0], ops.resize_backward(dy, cache))
        else:  # pragma: no cover
            raise ValueError(f"unknown node kind {kind!r}")
    return grads


def forward(graph: NetworkGraph, pset: ParameterSet, images: np.ndarray,
            mode: str = "eval", rng=None) -> np.ndarray:
    """Probability maps (N, S, S, 1) for a batch of images."""
    acts, _ = run_forward(graph, pset, images, mode=mode, rng=rng)
    return acts[graph.taps["probabilities"]]


def predict(graph: NetworkGraph, pset: ParameterSet, images: np.ndarray,
            batch_size: int = 8) -> np.ndarray:
    """Inference-mode forward in mini-batches (dropout off, running stats)."""
    images = np.asarray(images)
    outs = [forward(graph, pset, images[i:i + batch_size])
            for i in range(0, images.shape[0], batch_size)]
    return np.concatenate(outs, axis=0)
