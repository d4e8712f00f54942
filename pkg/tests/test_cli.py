"""End-to-end CLI flow: synth -> train -> eval -> report -> viz."""

import json
from pathlib import Path

import pytest
import yaml

from fgseglab.cli import main
from fgseglab.harness.experiments import DATA_ROOT_ENV


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")

    synth_spec = {"resolution": 32, "frame_count": 10,
                  "object_count": [1, 1], "object_size": [8, 12],
                  "object_speed": [1, 2]}
    (root / "synth.yaml").write_text(yaml.safe_dump(synth_spec))

    experiment = {
        "name": "cli-exp",
        "preset": "proposed",
        "model": {"input_size": 32, "encoder_base_filters": 4,
                  "encoder_dropout_rate": 0.0, "frozen_blocks": 0,
                  "fpm": {"branch_filters": 4, "dropout_rate": 0.0},
                  "decoder": {"conv_filters": [4, 4, 4]}},
        "schedule": {"max_epochs": 2, "initial_lr": 1e-3, "seed": 0},
        "dataset": {"kind": "synthetic", "root": str(root / "data"),
                    "frames_per_video": 5, "seed": 1},
    }
    (root / "exp.yaml").write_text(yaml.safe_dump(experiment))

    grid = {"defaults": {k: experiment[k] for k in ("model", "schedule", "dataset")},
            "experiments": [{"name": "grid", "preset": ["proposed", "E2"]}]}
    (root / "grid.yaml").write_text(yaml.safe_dump(grid))
    return root


def test_synth_command(workdir, capsys):
    rc = main(["synth", str(workdir / "synth.yaml"),
               "--out", str(workdir / "data" / "seq0"), "--seed", "4"])
    assert rc == 0
    assert (workdir / "data" / "seq0" / "manifest.jsonl").exists()
    assert len(list((workdir / "data" / "seq0" / "input").glob("*.png"))) == 10


def test_train_command(workdir, capsys):
    rc = main(["train", str(workdir / "exp.yaml"),
               "--out", str(workdir / "results")])
    out = capsys.readouterr().out
    assert rc == 0
    assert (workdir / "results" / "cli-exp" / "result.json").exists()
    assert "F-Measure" in out


def test_eval_command(workdir, capsys):
    ckpt = workdir / "results" / "cli-exp" / "checkpoint"
    selections = workdir / "results" / "cli-exp" / "result.json"
    sel = json.loads(selections.read_text())["selections"]
    sel_file = workdir / "sel.json"
    sel_file.write_text(json.dumps(sel))
    rc = main(["eval", str(ckpt), str(workdir / "data"), "--kind", "synthetic",
               "--selections", str(sel_file)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "synthetic" in out


def test_ablate_and_report_commands(workdir, capsys):
    rc = main(["ablate", str(workdir / "grid.yaml"),
               "--out", str(workdir / "grid-results"), "--format", "csv"])
    out = capsys.readouterr().out
    assert rc == 0
    assert (workdir / "grid-results" / "grid-proposed" / "result.json").exists()
    assert (workdir / "grid-results" / "grid-E2" / "result.json").exists()

    rc = main(["report", str(workdir / "grid-results"), "--format", "csv",
               "--out", str(workdir / "table.csv")])
    assert rc == 0
    table = (workdir / "table.csv").read_text()
    assert table.splitlines()[0].startswith("experiment,category,FPR,FNR")
    assert "grid-proposed" in table and "grid-E2" in table


def test_viz_command(workdir, capsys):
    ckpt = workdir / "results" / "cli-exp" / "checkpoint"
    rc = main(["viz", str(ckpt), str(workdir / "data"), "--kind", "synthetic",
               "--limit", "2", "--threshold", "0.5", "--alpha", "0.6",
               "--out", str(workdir / "overlays")])
    assert rc == 0
    pngs = sorted(p.name for p in (workdir / "overlays").glob("*.png"))
    assert len(pngs) == 4    # 2 frames x (overlay + mask)
    assert any(p.endswith("_overlay.png") for p in pngs)
    assert any(p.endswith("_mask.png") for p in pngs)


def test_dataset_root_env_override(workdir, monkeypatch, capsys):
    monkeypatch.setenv(DATA_ROOT_ENV, str(workdir))
    exp = yaml.safe_load((workdir / "exp.yaml").read_text())
    exp["name"] = "cli-env"
    exp["dataset"]["root"] = "data"      # relative; resolved under env root
    (workdir / "exp-env.yaml").write_text(yaml.safe_dump(exp))
    rc = main(["train", str(workdir / "exp-env.yaml"),
               "--out", str(workdir / "results-env")])
    assert rc == 0


def test_train_rejects_multi_spec(workdir, capsys):
    rc = main(["train", str(workdir / "grid.yaml"),
               "--out", str(workdir / "x")])
    assert rc == 2


def test_failed_experiment_exit_code(workdir, tmp_path, capsys):
    exp = yaml.safe_load((workdir / "exp.yaml").read_text())
    exp["name"] = "cli-bad"
    exp["dataset"]["root"] = str(tmp_path / "missing")
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump(exp))
    rc = main(["train", str(bad), "--out", str(tmp_path / "out")])
    assert rc == 1
