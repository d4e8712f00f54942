"""Command-line front end.

    fgseglab synth  <spec.yaml> --out DIR [--seed N]
    fgseglab train  <experiment.yaml> [--out DIR]
    fgseglab ablate <grid.yaml> [--out DIR] [--format csv|markdown]
    fgseglab eval   <checkpoint> <dataset-root> --kind KIND [...]
    fgseglab report <results-dir> [--format csv|markdown] [--layout ...]
    fgseglab viz    <checkpoint> <dataset-root> --kind KIND [...] --out DIR

Config documents are YAML; see README for the schemas.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from .data.sources import load_pair, scan
from .data.synth import SynthSpec, synth_generate
from .errors import FgSegLabError
from .harness.checkpoint import load_checkpoint
from .harness.experiments import (DatasetSelector, ExperimentResult,
                                  evaluate_on_index, load_result, run,
                                  select_videos)
from .harness.grid import parse_grid
from .harness.tables import emit_table
from .model.builder import build_model
from .viz import write_outputs

log = logging.getLogger(__name__)


def _cmd_synth(args):
    raw = yaml.safe_load(Path(args.spec).read_text()) or {}
    spec = SynthSpec(**{k: tuple(v) if isinstance(v, list) else v
                        for k, v in raw.items()})
    out = synth_generate(spec, seed=args.seed, out_path=args.out)
    print(f"wrote {out}")
    return 0


def _load_specs(path):
    raw = yaml.safe_load(Path(path).read_text())
    if isinstance(raw, dict) and "experiments" not in raw:
        raw = {"experiments": [raw]}
    return parse_grid(raw)


def _cmd_train(args):
    specs = _load_specs(args.config)
    if len(specs) != 1:
        print(f"train expects exactly one experiment, document expands to "
              f"{len(specs)}; use `fgseglab ablate`", file=sys.stderr)
        return 2
    result = run(specs[0], args.out)
    print(emit_table([result], fmt=args.format))
    return 0 if result.status == "ok" else 1


def _cmd_ablate(args):
    specs = _load_specs(args.config)
    results = []
    for spec in specs:
        log.info("running %s", spec.name)
        results.append(run(spec, args.out))
    print(emit_table(results, layout=args.layout, fmt=args.format))
    failed = [r.name for r in results if r.status != "ok"]
    if failed:
        print(f"failed experiments: {', '.join(failed)}", file=sys.stderr)
    return 0 if not failed else 1


def _selector_from_args(args) -> DatasetSelector:
    return DatasetSelector(
        kind=args.kind, root=args.dataset,
        categories=args.category or None, videos=args.video or None,
        cityscapes_classes=args.classes)


def _cmd_eval(args):
    ckpt = load_checkpoint(args.checkpoint)
    graph = build_model(ckpt.config)
    selector = _selector_from_args(args)
    index = scan(selector.resolve_root(), selector.kind)
    selections = {}
    if args.selections:
        selections = json.loads(Path(args.selections).read_text())
    per_video, per_category = evaluate_on_index(graph, ckpt.params, index,
                                                selector, selections)
    result = ExperimentResult(name=Path(args.checkpoint).parent.name or "eval",
                              per_video=per_video, per_category=per_category)
    print(emit_table([result], fmt=args.format))
    return 0


def _cmd_report(args):
    root = Path(args.results)
    result_files = sorted(root.glob("*/result.json"))
    if not result_files:
        print(f"no result.json files under {root}", file=sys.stderr)
        return 2
    results = [load_result(p.parent) for p in result_files]
    table = emit_table(results, layout=args.layout, fmt=args.format)
    if args.out:
        Path(args.out).write_text(table)
        print(f"wrote {args.out}")
    else:
        print(table)
    return 0


def _cmd_viz(args):
    ckpt = load_checkpoint(args.checkpoint)
    graph = build_model(ckpt.config)
    selector = _selector_from_args(args)
    index = scan(selector.resolve_root(), selector.kind)
    from .model.executor import predict

    def frames():
        emitted = 0
        for video in select_videos(index, selector):
            for ref in video.eval_frames():
                if args.limit and emitted >= args.limit:
                    return
                pair = load_pair(index, video, ref, graph.input_size,
                                 cityscapes_classes=args.classes)
                probs = predict(graph, ckpt.params, pair.image[None])[0, :, :, 0]
                emitted += 1
                yield pair.image, probs, pair.source.stem()

    written = write_outputs(frames(), args.out, theta=args.threshold,
                            alpha=args.alpha)
    print(f"wrote {len(written)} files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fgseglab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic sequence")
    p.add_argument("spec", help="YAML file with SynthSpec fields")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("train", help="train a single experiment")
    p.add_argument("config")
    p.add_argument("--out", default="results")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("ablate", help="run a whole experiment grid")
    p.add_argument("config")
    p.add_argument("--out", default="results")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--layout", choices=("per_category_rows", "variant_columns"),
                   default="per_category_rows")
    p.set_defaults(fn=_cmd_ablate)

    def dataset_args(p):
        p.add_argument("dataset", help="dataset root")
        p.add_argument("--kind", default="synthetic",
                       choices=("cdnet2014", "sbi2015", "cityscapes", "synthetic"))
        p.add_argument("--category", action="append")
        p.add_argument("--video", action="append")
        p.add_argument("--classes", default="road",
                       help="cityscapes foreground class group")

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("checkpoint")
    dataset_args(p)
    p.add_argument("--selections", help="JSON of training-frame selections to exclude")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("report", help="tabulate persisted results")
    p.add_argument("results")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--layout", choices=("per_category_rows", "variant_columns"),
                   default="per_category_rows")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("viz", help="write heatmap overlays and binary masks")
    p.add_argument("checkpoint")
    dataset_args(p)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--limit", type=int, default=0, help="max frames (0 = all)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_viz)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FgSegLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
