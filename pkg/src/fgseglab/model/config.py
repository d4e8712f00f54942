"""Architectural genotype: every ablation switch lives here.

A ModelConfig fully determines the layer graph that build_model produces.
Validation errors always name the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict, replace

from ..errors import ConfigurationError

ENCODERS = ("vgg16_truncated", "inception_v3", "xception", "inception_resnet_v2")
NORMALIZATIONS = ("instance_norm", "batch_norm")
DROPOUT_KINDS = ("spatial", "elementwise")
FEATURE_INJECTIONS = ("all_branches", "first_and_pooling_only")
OUTPUT_TOPOLOGIES = (
    "concat_all",              # stack every branch (plus pooling) into N x filters
    "last_dilation_only",      # keep only the widest-dilation branch
    "d16_plus_pooling_plus_d1",
    "drop_d2_from_concat",
    "no_pooling_connections",
    "no_concatenations",       # also strips the encoder-feature injections
)


@dataclass
class FPMConfig:
    """Feature pooling module: a chain of dilated 3x3 branches over the
    encoder features, optionally joined with a pooling branch and stacked."""

    enabled: bool = True
    dilation_rates: tuple[int, ...] = (1, 4, 8, 16)
    pooling_branch: bool = True
    encoder_feature_injection: str = "all_branches"
    output_topology: str = "concat_all"
    normalization: str = "instance_norm"
    dropout_kind: str = "spatial"
    branch_filters: int = 64
    dropout_rate: float = 0.25

    def validate(self):
        rates = tuple(self.dilation_rates)
        if not rates or rates[0] != 1:
            raise ConfigurationError(
                f"fpm.dilation_rates must start at 1, got {rates}")
        if any(b <= a for a, b in zip(rates, rates[1:])) or any(r < 1 for r in rates):
            raise ConfigurationError(
                f"fpm.dilation_rates must be strictly increasing positive ints, got {rates}")
        if self.encoder_feature_injection not in FEATURE_INJECTIONS:
            raise ConfigurationError(
                f"fpm.encoder_feature_injection: unknown value {self.encoder_feature_injection!r}")
        if self.output_topology not in OUTPUT_TOPOLOGIES:
            raise ConfigurationError(
                f"fpm.output_topology: unknown value {self.output_topology!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigurationError(
                f"fpm.normalization: unknown value {self.normalization!r}")
        if self.dropout_kind not in DROPOUT_KINDS:
            raise ConfigurationError(
                f"fpm.dropout_kind: unknown value {self.dropout_kind!r}")
        if self.output_topology == "d16_plus_pooling_plus_d1" and not self.pooling_branch:
            raise ConfigurationError(
                "fpm.output_topology 'd16_plus_pooling_plus_d1' requires pooling_branch")
        if self.output_topology == "drop_d2_from_concat" and 2 not in rates:
            raise ConfigurationError(
                "fpm.output_topology 'drop_d2_from_concat' requires a dilation-2 branch")
        if self.output_topology == "last_dilation_only" and self.dropout_kind != "elementwise":
            # Without the multi-feature stack, whole-channel dropout would
            # zero a large part of the only remaining branch.
            raise ConfigurationError(
                "fpm.dropout_kind must be 'elementwise' when output_topology "
                "is 'last_dilation_only'")
        if self.branch_filters < 1:
            raise ConfigurationError(
                f"fpm.branch_filters must be >= 1, got {self.branch_filters}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigurationError(
                f"fpm.dropout_rate must be in [0,1), got {self.dropout_rate}")


@dataclass
class DecoderConfig:
    """Decoder switches: two optional GAP-scaling paths fed by encoder
    outputs, with multiplicative (or additive) joins, then a 1x1 head."""

    gap_1: bool = True
    gap_2: bool = True
    encoder_skip_1: bool = True
    encoder_skip_2: bool = True
    mult_1: bool = True
    mult_2: bool = True
    normalization: str = "instance_norm"
    conv_filters: tuple[int, int, int] = (64, 64, 64)

    def validate(self):
        for i in (1, 2):
            mult = getattr(self, f"mult_{i}")
            gap = getattr(self, f"gap_{i}")
            skip = getattr(self, f"encoder_skip_{i}")
            if mult and not (gap and skip):
                raise ConfigurationError(
                    f"decoder.mult_{i} requires gap_{i} and encoder_skip_{i} "
                    "(a multiplication needs both operands)")
            if gap and not skip:
                raise ConfigurationError(
                    f"decoder.gap_{i} requires encoder_skip_{i} "
                    "(the GAP consumes the encoder output)")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigurationError(
                f"decoder.normalization: unknown value {self.normalization!r}")
        if len(tuple(self.conv_filters)) != 3 or any(f < 1 for f in self.conv_filters):
            raise ConfigurationError(
                f"decoder.conv_filters must be three positive ints, got {self.conv_filters}")


@dataclass
class ModelConfig:
    input_size: int = 512
    encoder: str = "vgg16_truncated"
    frozen_blocks: int = 3
    encoder_dropout_rate: float = 0.25
    # Width of the first encoder block; blocks scale 1x/2x/4x/8x as in VGG-16.
    encoder_base_filters: int = 64
    fpm: FPMConfig = field(default_factory=FPMConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)

    def validate(self):
        if self.input_size <= 0 or self.input_size % 8 != 0:
            raise ConfigurationError(
                f"input_size must be a positive multiple of 8 "
                f"(three exact 2x poolings), got {self.input_size}")
        if self.encoder not in ENCODERS:
            raise ConfigurationError(f"encoder: unknown value {self.encoder!r}")
        if not 0 <= self.frozen_blocks <= 4:
            raise ConfigurationError(
                f"frozen_blocks must be in 0..4, got {self.frozen_blocks}")
        if not 0.0 <= self.encoder_dropout_rate < 1.0:
            raise ConfigurationError(
                f"encoder_dropout_rate must be in [0,1), got {self.encoder_dropout_rate}")
        if self.encoder_base_filters < 1:
            raise ConfigurationError(
                f"encoder_base_filters must be >= 1, got {self.encoder_base_filters}")
        self.fpm.validate()
        self.decoder.validate()

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        data = dict(data)
        fpm = FPMConfig(**data.pop("fpm", {}))
        decoder = DecoderConfig(**data.pop("decoder", {}))
        fpm.dilation_rates = tuple(fpm.dilation_rates)
        decoder.conv_filters = tuple(decoder.conv_filters)
        return cls(fpm=fpm, decoder=decoder, **data)

    def override(self, overrides: dict) -> "ModelConfig":
        """Deep-merged copy; nested dicts patch fpm/decoder fields."""
        data = self.to_dict()
        for key, value in overrides.items():
            if key in ("fpm", "decoder") and isinstance(value, dict):
                data[key].update(value)
            else:
                data[key] = value
        return ModelConfig.from_dict(data)
