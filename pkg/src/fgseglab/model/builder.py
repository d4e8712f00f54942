"""Builds the encoder / feature-pooling / decoder graph from a ModelConfig.

Only the truncated VGG-16 encoder ships with a builder; the other encoder
choices are adapter slots (register_encoder_adapter) so externally converted
backbones can plug in without touching this module.
"""

from __future__ import annotations

from ..errors import ConfigurationError
from .config import ModelConfig
from .graph import NetworkGraph, Node


class _GraphBuilder:
    def __init__(self, config: ModelConfig):
        self.config = config
        self.nodes: list[Node] = []
        self.by_name: dict[str, Node] = {}

    def add(self, name, kind, inputs=(), stage="", attrs=None, params=None,
            buffers=None) -> str:
        if name in self.by_name:
            raise ConfigurationError(f"duplicate node name {name!r}")
        for inp in inputs:
            if inp not in self.by_name:
                raise ConfigurationError(f"node {name!r}: unknown input {inp!r}")
        node = Node(name=name, kind=kind, inputs=tuple(inputs), stage=stage,
                    attrs=dict(attrs or {}), params=dict(params or {}),
                    buffers=dict(buffers or {}))
        self.nodes.append(node)
        self.by_name[name] = node
        return name

    def out(self, name: str) -> tuple[int, int]:
        n = self.by_name[name]
        return n.attrs["out_channels"], n.attrs["out_size"]

    # -- composite helpers ------------------------------------------------

    def conv(self, name, inp, filters, kernel=3, dilation=1, stage="",
             block=None, role=None) -> str:
        cin, size = self.out(inp)
        attrs = {"kernel": kernel, "dilation": dilation,
                 "out_channels": filters, "out_size": size}
        if block is not None:
            attrs["block"] = block
        if role is not None:
            attrs["role"] = role
        return self.add(name, "conv", (inp,), stage, attrs,
                        params={"w": (kernel, kernel, cin, filters), "b": (filters,)})

    def relu(self, name, inp, stage="", block=None) -> str:
        c, size = self.out(inp)
        attrs = {"out_channels": c, "out_size": size}
        if block is not None:
            attrs["block"] = block
        return self.add(name, "relu", (inp,), stage, attrs)

    def norm(self, name, inp, kind, stage="") -> str:
        c, size = self.out(inp)
        buffers = {}
        if kind == "batch_norm":
            buffers = {"running_mean": (c,), "running_var": (c,)}
        return self.add(name, kind, (inp,), stage,
                        {"out_channels": c, "out_size": size},
                        params={"gamma": (c,), "beta": (c,)}, buffers=buffers)

    def dropout(self, name, inp, rate, kind="elementwise", stage="", block=None) -> str:
        c, size = self.out(inp)
        attrs = {"out_channels": c, "out_size": size, "rate": rate, "drop_kind": kind}
        if block is not None:
            attrs["block"] = block
        return self.add(name, "dropout", (inp,), stage, attrs)

    def maxpool(self, name, inp, kernel, stride, stage="", block=None, role=None) -> str:
        c, size = self.out(inp)
        out_size = size // stride
        if stride > 1 and size % stride != 0:
            raise ConfigurationError(f"node {name!r}: size {size} not divisible by {stride}")
        attrs = {"kernel": kernel, "stride": stride,
                 "out_channels": c, "out_size": out_size}
        if block is not None:
            attrs["block"] = block
        if role is not None:
            attrs["role"] = role
        return self.add(name, "maxpool", (inp,), stage, attrs)

    def concat(self, name, inputs, stage="", role=None) -> str:
        sizes = {self.out(i)[1] for i in inputs}
        if len(sizes) != 1:
            raise ConfigurationError(f"node {name!r}: concat inputs differ in size {sizes}")
        width = sum(self.out(i)[0] for i in inputs)
        attrs = {"out_channels": width, "out_size": sizes.pop()}
        if role is not None:
            attrs["role"] = role
        return self.add(name, "concat", tuple(inputs), stage, attrs)

    def graph(self, taps) -> NetworkGraph:
        return NetworkGraph(nodes=self.nodes, taps=taps, config=self.config)


# -- encoder adapters ------------------------------------------------------

def _build_vgg16_truncated(g: _GraphBuilder) -> str:
    """Truncated VGG-16: three 2-conv blocks each ending in a 2x max pool,
    then a 3-conv block with dropout after every conv.  Output stride 8."""
    cfg = g.config
    base = cfg.encoder_base_filters
    x = "input"
    for block, width in enumerate((base, 2 * base, 4 * base), start=1):
        for i in (1, 2):
            x = g.conv(f"encoder.block{block}.conv{i}", x, width,
                       stage="encoder", block=block)
            x = g.relu(f"encoder.block{block}.relu{i}", x,
                       stage="encoder", block=block)
        x = g.maxpool(f"encoder.block{block}.pool", x, kernel=2, stride=2,
                      stage="encoder", block=block)
    for i in (1, 2, 3):
        x = g.conv(f"encoder.block4.conv{i}", x, 8 * base,
                   stage="encoder", block=4)
        x = g.relu(f"encoder.block4.relu{i}", x, stage="encoder", block=4)
        x = g.dropout(f"encoder.block4.drop{i}", x, cfg.encoder_dropout_rate,
                      stage="encoder", block=4)
    return x


ENCODER_ADAPTERS = {"vgg16_truncated": _build_vgg16_truncated}


def register_encoder_adapter(name: str, build_fn):
    """Plug in an alternative backbone.  ``build_fn(builder) -> feature node``
    must leave the feature map at stride 8 relative to the input."""
    ENCODER_ADAPTERS[name] = build_fn


# -- FPM -------------------------------------------------------------------

def _build_fpm(g: _GraphBuilder, feat: str) -> str:
    cfg = g.config.fpm
    if not cfg.enabled:
        return feat

    chain_concats = (cfg.output_topology != "no_concatenations")
    inject_all = (cfg.encoder_feature_injection == "all_branches")

    branches = {}
    prev = None
    for idx, rate in enumerate(cfg.dilation_rates):
        if idx == 0:
            inp = feat
        elif chain_concats and inject_all:
            inp = g.concat(f"fpm.d{rate}.concat", (prev, feat), stage="fpm")
        else:
            inp = prev
        x = g.conv(f"fpm.d{rate}.conv", inp, cfg.branch_filters,
                   dilation=rate, stage="fpm", role="fpm_branch")
        prev = g.relu(f"fpm.d{rate}.relu", x, stage="fpm")
        branches[rate] = prev

    last = branches[cfg.dilation_rates[-1]]
    topology = cfg.output_topology
    pool_reachable = cfg.pooling_branch and topology in (
        "concat_all", "drop_d2_from_concat", "d16_plus_pooling_plus_d1")
    pool = None
    if pool_reachable:
        p = g.maxpool("fpm.pool.pool", feat, kernel=3, stride=1,
                      stage="fpm", role="fpm_pool")
        p = g.conv("fpm.pool.proj", p, cfg.branch_filters, kernel=1, stage="fpm")
        pool = g.relu("fpm.pool.relu", p, stage="fpm")

    if topology in ("last_dilation_only", "no_concatenations"):
        stacked = last
    else:
        if topology == "concat_all":
            inputs = [branches[r] for r in cfg.dilation_rates]
        elif topology == "drop_d2_from_concat":
            inputs = [branches[r] for r in cfg.dilation_rates if r != 2]
        elif topology == "no_pooling_connections":
            inputs = [branches[r] for r in cfg.dilation_rates]
        elif topology == "d16_plus_pooling_plus_d1":
            first, last_rate = cfg.dilation_rates[0], cfg.dilation_rates[-1]
            inputs = [branches[first], branches[last_rate]]
        else:  # pragma: no cover - validated upstream
            raise ConfigurationError(f"fpm.output_topology: {topology!r}")
        if pool is not None:
            inputs.append(pool)
        stacked = (g.concat("fpm.out.concat", inputs, stage="fpm", role="fpm_stack")
                   if len(inputs) > 1 else inputs[0])

    x = g.norm("fpm.out.norm", stacked, cfg.normalization, stage="fpm")
    x = g.dropout("fpm.out.drop", x, cfg.dropout_rate, kind=cfg.dropout_kind,
                  stage="fpm")
    return x


# -- decoder ---------------------------------------------------------------

def _build_decoder(g: _GraphBuilder, fpm_out: str, feat: str) -> tuple[str, str]:
    cfg = g.config.decoder
    feat_width, _ = g.out(feat)
    x = fpm_out
    for i, filters in enumerate(tuple(cfg.conv_filters), start=1):
        c, size = g.out(x)
        x = g.add(f"decoder.up{i}", "upsample", (x,), "decoder",
                  {"factor": 2, "out_channels": c, "out_size": size * 2})
        x = g.conv(f"decoder.stage{i}.conv", x, filters, stage="decoder")
        x = g.norm(f"decoder.stage{i}.norm", x, cfg.normalization, stage="decoder")

        if i in (1, 2):
            gap_on = getattr(cfg, f"gap_{i}")
            skip_on = getattr(cfg, f"encoder_skip_{i}")
            mult_on = getattr(cfg, f"mult_{i}")
            if gap_on:
                # GAP of the encoder features -> per-channel gate, broadcast
                # over the stage output (multiplied, or added when the
                # multiplication is ablated away).
                s = g.add(f"decoder.stage{i}.gap", "gap", (feat,), "decoder",
                          {"out_channels": feat_width, "out_size": 1,
                           "role": "encoder_injection"})
                s = g.conv(f"decoder.stage{i}.gapproj", s, filters, kernel=1,
                           stage="decoder")
                s = g.add(f"decoder.stage{i}.gapgate", "sigmoid", (s,), "decoder",
                          {"out_channels": filters, "out_size": 1})
                join_kind = "multiply" if mult_on else "add"
                x = g.add(f"decoder.stage{i}.join", join_kind, (x, s), "decoder",
                          {"out_channels": filters, "out_size": g.out(x)[1]})
            elif skip_on:
                # Encoder features injected spatially: resize + 1x1 + add.
                _, size_i = g.out(x)
                s = g.add(f"decoder.stage{i}.skipresize", "resize", (feat,),
                          "decoder", {"target": size_i,
                                      "out_channels": feat_width,
                                      "out_size": size_i,
                                      "role": "encoder_injection"})
                s = g.conv(f"decoder.stage{i}.skipproj", s, filters, kernel=1,
                           stage="decoder")
                x = g.add(f"decoder.stage{i}.join", "add", (x, s), "decoder",
                          {"out_channels": filters, "out_size": size_i})
        x = g.relu(f"decoder.stage{i}.relu", x, stage="decoder")

    logits = g.conv("decoder.head.conv", x, 1, kernel=1, stage="decoder")
    c, size = g.out(logits)
    probs = g.add("decoder.head.sigmoid", "sigmoid", (logits,), "decoder",
                  {"out_channels": c, "out_size": size})
    return logits, probs


def build_model(config: ModelConfig) -> NetworkGraph:
    """Assemble the full network graph for a validated configuration."""
    config.validate()
    if config.encoder not in ENCODER_ADAPTERS:
        raise ConfigurationError(
            f"encoder {config.encoder!r} has no registered adapter; only "
            f"{sorted(ENCODER_ADAPTERS)} can be built "
            "(use register_encoder_adapter to plug in a converted backbone)")
    g = _GraphBuilder(config)
    g.add("input", "input", (), "",
          {"out_channels": 3, "out_size": config.input_size})
    feat = ENCODER_ADAPTERS[config.encoder](g)
    fpm_out = _build_fpm(g, feat)
    logits, probs = _build_decoder(g, fpm_out, feat)

    size = g.out(probs)[1]
    if size != config.input_size:
        raise ConfigurationError(
            f"decoder output size {size} != input_size {config.input_size}")
    return g.graph(taps={
        "input": "input",
        "encoder_features": feat,
        "fpm_output": fpm_out,
        "logits": logits,
        "probabilities": probs,
    })
