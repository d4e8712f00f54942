"""Threshold, jet-heatmap and blend: the visualization path.

Writes overlay and binary-mask PNGs for a few frames using a quickly
trained model.  Red regions mark high foreground probability, blue low;
the binary mask applies the 0.5 threshold.
"""

from pathlib import Path

import numpy as np

from fgseglab.data.sources import load_pair, scan
from fgseglab.data.synth import SynthSpec, synth_generate
from fgseglab.model import build_model, get_preset, init_params
from fgseglab.model.executor import predict
from fgseglab.train import TrainSchedule, train
from fgseglab.viz import blend, heatmap, threshold, write_outputs

out = Path("demo_output/viz")
synth_generate(SynthSpec(resolution=64, frame_count=8, object_size=(14, 20)),
               seed=3, out_path=out / "data" / "seq0")
index = scan(out / "data", "synthetic")
video = index.videos[0]
pairs = [load_pair(index, video, f, 64) for f in video.frames]

config = get_preset("proposed").override({
    "input_size": 64, "encoder_base_filters": 8, "frozen_blocks": 0,
    "encoder_dropout_rate": 0.0,
    "fpm": {"branch_filters": 8, "dropout_rate": 0.0},
    "decoder": {"conv_filters": [8, 8, 8]}})
graph = build_model(config)
params = init_params(graph, seed=0)
schedule = TrainSchedule(initial_lr=3e-3, max_epochs=40, batch_size=4,
                         plateau_patience=8, early_stop_patience=20, seed=0)
params, _ = train(graph, params, pairs, pairs, schedule)

# the colormap itself, at a glance
ramp = np.linspace(0, 1, 9)
print("jet ramp:", [tuple(int(c) for c in rgb) for rgb in heatmap(ramp)])

def frames():
    for pair in pairs[:4]:
        probs = predict(graph, params, pair.image[None])[0, :, :, 0]
        fg = int(threshold(probs, 0.5).sum())
        print(f"frame {pair.source.frame}: {fg} pixels above threshold")
        yield pair.image, probs, pair.source.stem()

written = write_outputs(frames(), out / "overlays", theta=0.5, alpha=0.5)
print(f"\nwrote {len(written)} PNGs under {out / 'overlays'}")
print("overlay = round((1-alpha)*raw + alpha*jet(probs)), alpha 0.5")
