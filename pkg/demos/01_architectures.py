"""Build every ablation preset and inspect its structure.

The presets span the whole published test grid: the dilation ladder (D*),
stack/concatenation surgery (C*), feature-injection and module removal (E*),
decoder GAP pairs (G*) and decoder multiplications (M*), plus the baseline
and the final proposed variant.  Each one is a full layer graph; the
structural summary is what the test suite pins down.
"""

from fgseglab.model import (STRUCTURAL_PRESET_NAMES, build_model, get_preset,
                            structural_summary)

header = (f"{'preset':12s} {'dilations':18s} {'pool':>4s} {'arity':>5s} "
          f"{'width':>5s} {'GAP':>3s} {'mult':>4s} {'params':>10s}")
print(header)
print("-" * len(header))
for name in STRUCTURAL_PRESET_NAMES:
    graph = build_model(get_preset(name))
    s = structural_summary(graph)
    dil = ",".join(str(d) for d in s.dilation_rates) or "-"
    print(f"{name:12s} {dil:18s} {s.pooling_branches:4d} {s.fpm_concat_arity:5d} "
          f"{s.fpm_output_width:5d} {s.gap_count:3d} {s.mult_count:4d} "
          f"{s.trainable_params + s.frozen_params:10,d}")

print()
proposed = build_model(get_preset("proposed"))
print(f"proposed graph: {len(proposed.nodes)} nodes; taps = {proposed.taps}")
print("first ten nodes:")
for node in proposed.nodes[:10]:
    print(f"  {node.name:28s} {node.kind:12s} -> {node.out_channels:4d} ch "
          f"@ {node.out_size}px")
