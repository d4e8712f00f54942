"""Named architecture presets covering the whole ablation grid.

Naming scheme: ``baseline_v2`` is the unmodified reference architecture;
``proposed`` is the final variant (dilation-2 branch added, pooling branch
removed, single d16 output, batch norm + elementwise dropout, no decoder
GAP paths).  D* vary the dilation ladder, C* the stack/concatenations,
E* the feature injections / whole module, G* the decoder GAP+skip pairs,
M* the decoder multiplications.  The ``enc_*`` presets select alternative
backbones and only build once a matching encoder adapter is registered.
"""

from __future__ import annotations

from .config import DecoderConfig, FPMConfig, ModelConfig

BASELINE_RATES = (1, 4, 8, 16)
EXTENDED_RATES = (1, 2, 4, 8, 16)


def _baseline_fpm(**kw) -> FPMConfig:
    base = dict(dilation_rates=BASELINE_RATES, pooling_branch=True,
                encoder_feature_injection="all_branches",
                output_topology="concat_all", normalization="instance_norm",
                dropout_kind="spatial")
    base.update(kw)
    return FPMConfig(**base)


def _proposed_fpm(**kw) -> FPMConfig:
    base = dict(dilation_rates=EXTENDED_RATES, pooling_branch=False,
                encoder_feature_injection="all_branches",
                output_topology="last_dilation_only", normalization="batch_norm",
                dropout_kind="elementwise")
    base.update(kw)
    return FPMConfig(**base)


def _decoder(**kw) -> DecoderConfig:
    base = dict(gap_1=True, gap_2=True, encoder_skip_1=True, encoder_skip_2=True,
                mult_1=True, mult_2=True)
    base.update(kw)
    return DecoderConfig(**base)


def _no_gap_decoder() -> DecoderConfig:
    return _decoder(gap_1=False, gap_2=False, encoder_skip_1=False,
                    encoder_skip_2=False, mult_1=False, mult_2=False)


_PRESET_BUILDERS = {
    # reference + final variant
    "baseline_v2": lambda: ModelConfig(fpm=_baseline_fpm(), decoder=_decoder()),
    "proposed": lambda: ModelConfig(fpm=_proposed_fpm(), decoder=_no_gap_decoder()),

    # dilation ladder (on the baseline stack)
    "D1": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=(1, 4, 8)),
                              decoder=_decoder()),
    "D2": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES),
                              decoder=_decoder()),
    "D3": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=(1, 2, 4, 8)),
                              decoder=_decoder()),

    # stack / concatenation surgery (on the extended ladder)
    "C1": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                output_topology="drop_d2_from_concat"),
                              decoder=_decoder()),
    "C2": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                output_topology="d16_plus_pooling_plus_d1"),
                              decoder=_decoder()),
    "C3": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                output_topology="no_pooling_connections"),
                              decoder=_decoder()),
    "C4": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                output_topology="last_dilation_only",
                                                dropout_kind="elementwise"),
                              decoder=_decoder()),
    "C5": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                output_topology="no_concatenations"),
                              decoder=_decoder()),

    # feature injection / module removal / pooling removal
    "E1": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                encoder_feature_injection="first_and_pooling_only"),
                              decoder=_decoder()),
    "E2": lambda: ModelConfig(fpm=_baseline_fpm(enabled=False), decoder=_decoder()),
    "E3": lambda: ModelConfig(fpm=_baseline_fpm(dilation_rates=EXTENDED_RATES,
                                                pooling_branch=False),
                              decoder=_decoder()),

    # decoder GAP / encoder-output pairs (on the proposed FPM)
    "G1": lambda: ModelConfig(fpm=_proposed_fpm(),
                              decoder=_decoder(gap_1=False, encoder_skip_1=False,
                                               mult_1=False)),
    "G2": lambda: ModelConfig(fpm=_proposed_fpm(),
                              decoder=_decoder(gap_2=False, encoder_skip_2=False,
                                               mult_2=False)),
    "G3": lambda: ModelConfig(fpm=_proposed_fpm(), decoder=_no_gap_decoder()),
    "G4": lambda: ModelConfig(fpm=_proposed_fpm(),
                              decoder=_decoder(gap_1=False, mult_1=False)),
    "G5": lambda: ModelConfig(fpm=_proposed_fpm(),
                              decoder=_decoder(gap_2=False, mult_2=False)),
    "G6": lambda: ModelConfig(fpm=_proposed_fpm(),
                              decoder=_decoder(gap_1=False, gap_2=False,
                                               mult_1=False, mult_2=False)),

    # decoder multiplications (GAP paths kept, joins become additive)
    "M1": lambda: ModelConfig(fpm=_proposed_fpm(), decoder=_decoder(mult_1=False)),
    "M2": lambda: ModelConfig(fpm=_proposed_fpm(), decoder=_decoder(mult_2=False)),
    "M3": lambda: ModelConfig(fpm=_proposed_fpm(),
                              decoder=_decoder(mult_1=False, mult_2=False)),

    # backbone swaps (adapter stubs; need register_encoder_adapter to build)
    "enc_inception_v3": lambda: ModelConfig(encoder="inception_v3",
                                            fpm=_proposed_fpm(),
                                            decoder=_no_gap_decoder()),
    "enc_xception": lambda: ModelConfig(encoder="xception",
                                        fpm=_proposed_fpm(),
                                        decoder=_no_gap_decoder()),
    "enc_inception_resnet_v2": lambda: ModelConfig(encoder="inception_resnet_v2",
                                                   fpm=_proposed_fpm(),
                                                   decoder=_no_gap_decoder()),
}

PRESET_NAMES = tuple(_PRESET_BUILDERS)

# Presets whose structure is pinned by the published ablation tables (the
# backbone swaps are excluded: they need external adapters).
STRUCTURAL_PRESET_NAMES = tuple(n for n in PRESET_NAMES if not n.startswith("enc_"))


def get_preset(name: str) -> ModelConfig:
    """Fresh ModelConfig for a named preset."""
    try:
        builder = _PRESET_BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}") from None
    return builder()
