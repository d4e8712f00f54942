"""Run a small ablation grid and emit the comparison tables.

Three stack variants train on two synthetic videos; results, checkpoints
and frame selections are persisted under demo_output/grid-results so the
tables can be regenerated offline (`fgseglab report demo_output/grid-results`).
"""

from pathlib import Path

from fgseglab.data.synth import SynthSpec, synth_generate
from fgseglab.harness import emit_table, parse_grid, run

data = Path("demo_output/grid-data")
for i in range(2):
    synth_generate(SynthSpec(resolution=32, frame_count=16, object_count=(1, 2),
                             object_size=(8, 14), object_speed=(1, 2)),
                   seed=20 + i, out_path=data / f"seq{i}")

grid = {
    "defaults": {
        "model": {"input_size": 32, "encoder_base_filters": 8,
                  "encoder_dropout_rate": 0.0, "frozen_blocks": 0,
                  "fpm": {"branch_filters": 8, "dropout_rate": 0.0},
                  "decoder": {"conv_filters": [8, 8, 8]}},
        "schedule": {"optimizer": "adam", "initial_lr": 2e-3, "max_epochs": 15,
                     "plateau_patience": 5, "early_stop_patience": 10, "seed": 0},
        "dataset": {"kind": "synthetic", "root": str(data),
                    "frames_per_video": 10, "seed": 1},
    },
    "experiments": [
        {"name": "stack", "preset": ["baseline_v2", "C4", "proposed"]},
    ],
}

specs = parse_grid(grid)
print(f"grid expands to {len(specs)} experiments: {[s.name for s in specs]}\n")
results = []
for spec in specs:
    result = run(spec, "demo_output/grid-results")
    status = result.per_category["synthetic"].f_measure if result.status == "ok" \
        else result.error
    print(f"  {result.name:22s} {result.wall_time:5.1f}s  F={status}")
    results.append(result)

print("\nlong layout (one row per experiment x category):\n")
print(emit_table(results, layout="per_category_rows", fmt="markdown"))
print("wide layout (variant columns, like the published ablation tables):\n")
print(emit_table(results, layout="variant_columns", fmt="markdown"))
