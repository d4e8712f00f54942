import numpy as np
import pytest
from PIL import Image

from fgseglab.data.synth import SynthSpec, synth_generate
from fgseglab.model.presets import get_preset


def shrunken(preset="proposed", input_size=32, base=4, bf=4, drop=0.0,
             frozen=0, **extra):
    """Desk-scale variant of a preset for fast tests."""
    overrides = {
        "input_size": input_size, "encoder_base_filters": base,
        "encoder_dropout_rate": drop, "frozen_blocks": frozen,
        "fpm": {"branch_filters": bf, "dropout_rate": drop},
        "decoder": {"conv_filters": [bf, bf, bf]},
    }
    for k, v in extra.items():
        if isinstance(v, dict):
            overrides.setdefault(k, {}).update(v)
        else:
            overrides[k] = v
    return get_preset(preset).override(overrides)


@pytest.fixture(scope="session")
def synth_root(tmp_path_factory):
    """Two small synthetic videos (32x32, 12 frames) for harness tests."""
    root = tmp_path_factory.mktemp("synth") / "data"
    for i in range(2):
        spec = SynthSpec(resolution=32, frame_count=12, object_count=(1, 2),
                         object_size=(8, 12), object_speed=(1, 2))
        synth_generate(spec, seed=10 + i, out_path=root / f"seq{i}")
    return root


@pytest.fixture(scope="session")
def overfit_root(tmp_path_factory):
    """The 8-frame 64x64 sequence used by the overfit acceptance test."""
    root = tmp_path_factory.mktemp("overfit") / "data"
    spec = SynthSpec(resolution=64, frame_count=8, object_count=(1, 1),
                     object_size=(16, 22), object_speed=(1, 2))
    synth_generate(spec, seed=5, out_path=root / "seq0")
    return root


def write_cdnet_fixture(root, category="baseline", video="vid1", n_frames=12,
                        roi=(5, 10), size=24, label_values=(0, 50, 85, 170, 255)):
    """Minimal CDNet2014-layout directory with known ground-truth values."""
    vdir = root / category / video
    (vdir / "input").mkdir(parents=True)
    (vdir / "groundtruth").mkdir(parents=True)
    rng = np.random.default_rng(0)
    for i in range(1, n_frames + 1):
        img = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
        Image.fromarray(img).save(vdir / "input" / f"in{i:06d}.jpg")
        gt = np.zeros((size, size), dtype=np.uint8)
        # one horizontal stripe per label value
        stripe = max(size // len(label_values), 1)
        for j, val in enumerate(label_values):
            gt[j * stripe:(j + 1) * stripe, :] = val
        Image.fromarray(gt).save(vdir / "groundtruth" / f"gt{i:06d}.png")
    if roi is not None:
        (vdir / "temporalROI.txt").write_text(f"{roi[0]} {roi[1]}\n")
    return vdir
