import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np
import pytest

from fgseglab.harness.experiments import (DatasetSelector, ExperimentSpec,
                                          load_result, reevaluate, run,
                                          split_train_val)
from fgseglab.harness.grid import parse_grid
from fgseglab.harness.tables import emit_table
from fgseglab.errors import EvaluationError
from fgseglab.metrics import MetricsReport
from fgseglab.harness.experiments import ExperimentResult


def grid_doc(root, **entry):
    base = {
        "defaults": {
            "model": {"input_size": 32, "encoder_base_filters": 4,
                      "encoder_dropout_rate": 0.0, "frozen_blocks": 0,
                      "fpm": {"branch_filters": 4, "dropout_rate": 0.0},
                      "decoder": {"conv_filters": [4, 4, 4]}},
            "schedule": {"max_epochs": 2, "initial_lr": 1e-3, "seed": 0},
            "dataset": {"kind": "synthetic", "root": str(root),
                        "frames_per_video": 6, "seed": 3},
        },
        "experiments": [dict({"name": "t", "preset": "proposed"}, **entry)],
    }
    return base


def tree_digest(root):
    h = hashlib.sha256()
    for p in sorted(Path(root).rglob("*")):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode())
            h.update(p.read_bytes())
    return h.hexdigest()


class TestRun:
    def test_ok_row_with_all_fields(self, synth_root, tmp_path):
        spec = parse_grid(grid_doc(synth_root))[0]
        result = run(spec, tmp_path)
        assert result.status == "ok", result.error
        assert set(result.per_category) == {"synthetic"}
        report = result.per_category["synthetic"]
        for field in ("recall", "precision", "f_measure", "mcc", "pwc", "miou"):
            assert getattr(report, field) is not None
        assert result.checkpoint_path
        assert (Path(result.checkpoint_path) / "manifest.json").exists()
        assert result.history["epochs"] == 2
        assert set(result.selections) == {"synthetic/seq0", "synthetic/seq1"}
        assert all(len(v) == 6 for v in result.selections.values())

    def test_determinism_rows_and_checkpoints(self, synth_root, tmp_path):
        spec = parse_grid(grid_doc(synth_root))[0]
        r1 = run(spec, tmp_path / "run1")
        r2 = run(spec, tmp_path / "run2")
        for key in r1.per_video:
            a, b = r1.per_video[key], r2.per_video[key]
            for field in ("f_measure", "mcc", "miou", "pwc", "recall", "precision"):
                assert abs(getattr(a, field) - getattr(b, field)) <= 1e-6
        assert tree_digest(Path(r1.checkpoint_path)) == \
            tree_digest(Path(r2.checkpoint_path))

    def test_missing_root_is_failed_row(self, tmp_path):
        doc = grid_doc(tmp_path / "nope")
        spec = parse_grid(doc)[0]
        result = run(spec, tmp_path / "out")
        assert result.status == "failed"
        assert "ScanError" in result.error
        assert (tmp_path / "out" / "t" / "result.json").exists()

    def test_all_frames_selected_is_failed_row(self, synth_root, tmp_path):
        doc = grid_doc(synth_root)
        doc["defaults"]["dataset"]["frames_per_video"] = 12   # uses every frame
        spec = parse_grid(doc)[0]
        result = run(spec, tmp_path)
        assert result.status == "failed"
        assert "EvaluationError" in result.error

    def test_result_json_round_trip(self, synth_root, tmp_path):
        spec = parse_grid(grid_doc(synth_root))[0]
        result = run(spec, tmp_path)
        loaded = load_result(tmp_path / spec.name)
        assert loaded.name == result.name
        assert loaded.status == "ok"
        assert loaded.per_category["synthetic"].f_measure == \
            pytest.approx(result.per_category["synthetic"].f_measure, abs=1e-12)

    def test_reevaluate_reproduces_rows(self, synth_root, tmp_path):
        spec = parse_grid(grid_doc(synth_root))[0]
        result = run(spec, tmp_path)
        per_video, per_category = reevaluate(
            result.checkpoint_path, spec.dataset, result.selections,
            spec.metric_scheme)
        for key, want in result.per_video.items():
            got = per_video[key]
            for field in ("f_measure", "mcc", "miou"):
                assert abs(getattr(got, field) - getattr(want, field)) <= 1e-6

    def test_video_selector_filters(self, synth_root, tmp_path):
        doc = grid_doc(synth_root, dataset={"videos": ["synthetic/seq1"]})
        spec = parse_grid(doc)[0]
        result = run(spec, tmp_path)
        assert result.status == "ok"
        assert list(result.per_video) == ["synthetic/seq1"]


class TestSplit:
    def test_stratified_seeded(self, synth_root):
        from fgseglab.data.sources import load_pair, scan
        index = scan(synth_root, "synthetic")
        pairs = [load_pair(index, index.videos[0], f, 32)
                 for f in index.videos[0].frames]
        tr1, va1 = split_train_val(pairs, seed=5)
        tr2, va2 = split_train_val(pairs, seed=5)
        assert [p.source.frame for p in va1] == [p.source.frame for p in va2]
        assert len(tr1) + len(va1) == len(pairs)
        assert va1 and tr1

    def test_single_frame_falls_back(self, synth_root):
        from fgseglab.data.sources import load_pair, scan
        index = scan(synth_root, "synthetic")
        pairs = [load_pair(index, index.videos[0], 1, 32)]
        tr, va = split_train_val(pairs, seed=0)
        assert tr and va


class TestTables:
    @staticmethod
    def _result(name, f=0.9, scheme="mean_of_videos", status="ok"):
        report = MetricsReport(recall=0.9, precision=0.8, fpr=0.01, fnr=0.1,
                               pwc=1.5, f_measure=f, mcc=0.7, miou=0.75, auc=0.99)
        return ExperimentResult(name=name, status=status,
                                error=None if status == "ok" else "boom",
                                per_category={"catA": report, "catB": report},
                                metric_scheme=scheme)

    def test_row_count_and_column_order(self):
        table = emit_table([self._result("a"), self._result("b")], fmt="csv")
        rows = list(csv.reader(io.StringIO(table)))
        assert rows[0] == ["experiment", "category", "FPR", "FNR", "Recall",
                           "Precision", "PWC", "F-Measure", "MCC", "mIoU", "AUC"]
        assert len(rows) == 1 + 4     # 2 experiments x 2 categories

    def test_csv_values_round_trip_exactly(self):
        result = self._result("a", f=0.12345678901234567)
        table = emit_table([result], fmt="csv")
        rows = list(csv.reader(io.StringIO(table)))
        f_col = rows[0].index("F-Measure")
        assert float(rows[1][f_col]) == result.per_category["catA"].f_measure

    def test_markdown_shape(self):
        md = emit_table([self._result("a")], fmt="markdown")
        lines = md.strip().splitlines()
        assert lines[0].startswith("| experiment | category |")
        assert lines[1].startswith("| ---")
        assert len(lines) == 2 + 2

    def test_variant_columns_layout(self):
        md = emit_table([self._result("a"), self._result("b")],
                        layout="variant_columns", fmt="markdown")
        head = md.splitlines()[0]
        assert "a:F-Measure" in head and "b:mIoU" in head
        assert md.splitlines()[2].startswith("| catA |")

    def test_mixed_schemes_rejected(self):
        with pytest.raises(EvaluationError, match="mix"):
            emit_table([self._result("a"), self._result("b", scheme="pooled_counts")])

    def test_failed_rows_visible(self):
        table = emit_table([self._result("a"), self._result("bad", status="failed")],
                           fmt="csv")
        assert "FAILED: boom" in table

    def test_empty_rejected(self):
        with pytest.raises(EvaluationError):
            emit_table([])
