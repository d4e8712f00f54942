"""Declarative experiment grids (YAML) expanded into ExperimentSpec lists.

Document shape::

    defaults:                  # optional; merged under every experiment
      schedule: {max_epochs: 20, seed: 0}
      dataset:  {kind: synthetic, root: data/synth, frames_per_video: 8}
      model:    {input_size: 64, encoder_base_filters: 8}
      metric_scheme: mean_of_videos
    experiments:
      - name: stack-ablation
        preset: [C3, C4, proposed]     # string or list; lists expand
        seeds: [0, 1]                  # optional; expands schedule.seed
        model: {fpm: {branch_filters: 8}}
        schedule: {max_epochs: 10}
        dataset: {videos: [synthetic/seq0]}

Expanded names are ``<name>-<preset>`` and ``...-s<seed>`` when a list was
given.  Expansion is deterministic and order-stable; duplicate names are an
error.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from ..errors import GridParseError
from ..model.config import ModelConfig
from ..model.presets import get_preset
from ..train.schedule import TrainSchedule
from .experiments import METRIC_SCHEMES, DatasetSelector, ExperimentSpec

_ENTRY_KEYS = {"name", "preset", "seeds", "model", "schedule", "dataset",
               "metric_scheme", "pretrained_bundle"}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _build_spec(name, preset, entry, where) -> ExperimentSpec:
    try:
        if preset is not None:
            model = get_preset(preset)
        else:
            model = ModelConfig()
        model = model.override(entry.get("model", {}))
        schedule = TrainSchedule.from_dict(entry.get("schedule", {}))
        dataset = DatasetSelector(**entry.get("dataset", {}))
        spec = ExperimentSpec(
            name=name, model=model, schedule=schedule, dataset=dataset,
            metric_scheme=entry.get("metric_scheme", "mean_of_videos"),
            pretrained_bundle=entry.get("pretrained_bundle"), preset=preset)
        spec.validate()
    except GridParseError:
        raise
    except Exception as e:
        raise GridParseError(f"{where}: {e}") from e
    return spec


def parse_grid(document) -> list[ExperimentSpec]:
    """Parse a grid document (path, YAML string, or mapping)."""
    if isinstance(document, (str, Path)) and Path(str(document)).is_file():
        raw = yaml.safe_load(Path(document).read_text())
    elif isinstance(document, str):
        raw = yaml.safe_load(document)
    else:
        raw = document
    if not isinstance(raw, dict):
        raise GridParseError("grid document must be a mapping")

    unknown_top = set(raw) - {"defaults", "experiments", "name"}
    if unknown_top:
        raise GridParseError(f"unknown top-level keys: {sorted(unknown_top)}")
    entries = raw.get("experiments")
    if not entries:
        raise GridParseError("grid document lists no experiments")
    defaults = raw.get("defaults", {}) or {}

    specs: list[ExperimentSpec] = []
    seen = set()
    for i, entry in enumerate(entries):
        where = f"experiments[{i}]"
        if not isinstance(entry, dict):
            raise GridParseError(f"{where}: entry must be a mapping")
        unknown = set(entry) - _ENTRY_KEYS
        if unknown:
            raise GridParseError(f"{where}: unknown keys {sorted(unknown)}")
        if "name" not in entry:
            raise GridParseError(f"{where}: missing name")
        merged = _merge(defaults, entry)

        presets = merged.get("preset")
        preset_list = presets if isinstance(presets, list) else [presets]
        seeds = merged.get("seeds")
        seed_list = seeds if isinstance(seeds, list) else [None]
        if not preset_list or not seed_list:
            raise GridParseError(f"{where}: empty preset/seeds list")

        for preset in preset_list:
            for seed in seed_list:
                name = merged["name"]
                if isinstance(presets, list):
                    name = f"{name}-{preset}"
                if seed is not None:
                    name = f"{name}-s{seed}"
                if name in seen:
                    raise GridParseError(f"{where}: duplicate experiment name {name!r}")
                seen.add(name)
                sub = dict(merged)
                if seed is not None:
                    sub["schedule"] = _merge(sub.get("schedule", {}), {"seed": seed})
                specs.append(_build_spec(name, preset, sub, where))
    return specs
