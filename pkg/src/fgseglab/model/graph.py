"""Declarative layer graph and its structural summary.

The graph is a topologically ordered list of nodes with named edges; it
carries enough attributes (kernel sizes, dilation rates, channel counts,
normalization/dropout kinds) for both execution and structural assertions.
Construction is pure: the same config always yields the same graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import ConfigurationError
from .config import ModelConfig


@dataclass
class Node:
    name: str
    kind: str
    inputs: tuple[str, ...] = ()
    stage: str = ""                       # encoder | fpm | decoder
    attrs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)    # suffix -> shape
    buffers: dict = field(default_factory=dict)   # suffix -> shape

    @property
    def out_channels(self) -> int:
        return self.attrs["out_channels"]

    @property
    def out_size(self) -> int:
        return self.attrs["out_size"]

    def param_names(self):
        return [f"{self.name}.{suffix}" for suffix in self.params]


@dataclass
class NetworkGraph:
    nodes: list[Node]
    taps: dict[str, str]      # input, encoder_features, fpm_output, logits, probabilities
    config: ModelConfig

    def __post_init__(self):
        self.by_name = {n.name: n for n in self.nodes}

    @property
    def input_size(self) -> int:
        return self.config.input_size

    def node(self, name: str) -> Node:
        return self.by_name[name]

    def param_shapes(self) -> dict[str, tuple]:
        shapes = {}
        for n in self.nodes:
            for suffix, shape in n.params.items():
                shapes[f"{n.name}.{suffix}"] = tuple(shape)
        return shapes

    def buffer_shapes(self) -> dict[str, tuple]:
        shapes = {}
        for n in self.nodes:
            for suffix, shape in n.buffers.items():
                shapes[f"{n.name}.{suffix}"] = tuple(shape)
        return shapes

    def frozen_param_names(self, frozen_blocks: int | None = None) -> frozenset[str]:
        """Parameters of the first ``frozen_blocks`` encoder blocks."""
        limit = self.config.frozen_blocks if frozen_blocks is None else frozen_blocks
        frozen = set()
        for n in self.nodes:
            if n.stage == "encoder" and n.attrs.get("block", 99) <= limit:
                frozen.update(n.param_names())
        return frozenset(frozen)


@dataclass(frozen=True)
class StructuralSummary:
    """Counts and widths used as the oracle for every ablation preset."""

    layers_per_stage: tuple[tuple[str, int], ...] = ()
    dilation_rates: tuple[int, ...] = ()
    gap_count: int = 0
    mult_count: int = 0
    concat_count: int = 0
    fpm_concat_arity: int = 0
    fpm_output_width: int = 0
    pooling_branches: int = 0
    encoder_skip_count: int = 0
    trainable_params: int = 0
    frozen_params: int = 0


def structural_summary(graph: NetworkGraph) -> StructuralSummary:
    """Pure derivation of the summary; identical graphs give identical results."""
    per_stage: dict[str, int] = {}
    dilations = set()
    gap_count = mult_count = concat_count = pooling = 0

    for n in graph.nodes:
        if n.kind == "input":
            continue
        per_stage[n.stage] = per_stage.get(n.stage, 0) + 1
        if n.kind == "conv" and n.attrs.get("role") == "fpm_branch":
            dilations.add(n.attrs["dilation"])
        if n.kind == "gap":
            gap_count += 1
        if n.kind == "multiply":
            mult_count += 1
        if n.kind == "concat":
            concat_count += 1
        if n.attrs.get("role") == "fpm_pool":
            pooling += 1

    stack_name = next((n.name for n in graph.nodes
                       if n.attrs.get("role") == "fpm_stack"), None)
    arity = len(graph.node(stack_name).inputs) if stack_name else 0

    fpm_out = graph.node(graph.taps["fpm_output"])

    skip_count = sum(1 for n in graph.nodes
                     if n.stage == "decoder"
                     and n.attrs.get("role") == "encoder_injection")

    frozen_names = graph.frozen_param_names()
    trainable = frozen = 0
    for n in graph.nodes:
        for suffix, shape in n.params.items():
            count = int(math.prod(shape))
            if f"{n.name}.{suffix}" in frozen_names:
                frozen += count
            else:
                trainable += count

    return StructuralSummary(
        layers_per_stage=tuple(sorted(per_stage.items())),
        dilation_rates=tuple(sorted(dilations)),
        gap_count=gap_count,
        mult_count=mult_count,
        concat_count=concat_count,
        fpm_concat_arity=arity,
        fpm_output_width=fpm_out.out_channels,
        pooling_branches=pooling,
        encoder_skip_count=skip_count,
        trainable_params=trainable,
        frozen_params=frozen,
    )
