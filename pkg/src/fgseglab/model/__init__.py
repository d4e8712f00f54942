from .builder import ENCODER_ADAPTERS, build_model, register_encoder_adapter
from .config import DecoderConfig, FPMConfig, ModelConfig
from .executor import forward, predict, run_backward, run_forward
from .gradcheck import GradCheckResult, check_gradients
from .graph import NetworkGraph, Node, StructuralSummary, structural_summary
from .params import (
    ParameterSet, apply_pretrained_and_freeze, init_params,
    load_weight_bundle, save_weight_bundle,
)
from .presets import PRESET_NAMES, STRUCTURAL_PRESET_NAMES, get_preset

__all__ = [
    "ENCODER_ADAPTERS", "build_model", "register_encoder_adapter",
    "DecoderConfig", "FPMConfig", "ModelConfig",
    "forward", "predict", "run_backward", "run_forward",
    "GradCheckResult", "check_gradients",
    "NetworkGraph", "Node", "StructuralSummary", "structural_summary",
    "ParameterSet", "apply_pretrained_and_freeze", "init_params",
    "load_weight_bundle", "save_weight_bundle",
    "PRESET_NAMES", "STRUCTURAL_PRESET_NAMES", "get_preset",
]
