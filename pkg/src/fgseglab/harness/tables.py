"""Comparison tables from experiment results (CSV or markdown).

Metric columns always follow the canonical order FPR, FNR, Recall,
Precision, PWC, F-Measure, MCC, mIoU, with AUC appended when any row has
one.  CSV cells use shortest round-trip float formatting, so reading them
back reproduces the values exactly.
"""

from __future__ import annotations

import csv
import io

from ..errors import EvaluationError
from ..metrics import MetricsReport
from .experiments import ExperimentResult

METRIC_HEADERS = ("FPR", "FNR", "Recall", "Precision", "PWC", "F-Measure",
                  "MCC", "mIoU")
_FIELDS = ("fpr", "fnr", "recall", "precision", "pwc", "f_measure", "mcc", "miou")

LAYOUTS = ("per_category_rows", "variant_columns")
FORMATS = ("csv", "markdown")


def _check(results: list[ExperimentResult], layout, fmt):
    if not results:
        raise EvaluationError("no results to tabulate")
    if layout not in LAYOUTS:
        raise EvaluationError(f"unknown layout {layout!r}")
    if fmt not in FORMATS:
        raise EvaluationError(f"unknown format {fmt!r}")
    schemes = {r.metric_scheme for r in results}
    if len(schemes) > 1:
        raise EvaluationError(
            f"cannot mix metric schemes in one table: {sorted(schemes)}")


def _metric_values(report: MetricsReport, with_auc: bool):
    vals = [getattr(report, f) for f in _FIELDS]
    if with_auc:
        vals.append(report.auc)
    return vals


def _rows_long(results):
    rows = []
    for result in sorted(results, key=lambda r: r.name):
        if result.status != "ok":
            rows.append((result.name, "-", None, result.error))
            continue
        for category in sorted(result.per_category):
            rows.append((result.name, category,
                         result.per_category[category], None))
    return rows


def _fmt_cell(value, fmt):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if fmt == "csv" else f"{value:.4f}"
    return str(value)


def emit_table(results: list[ExperimentResult], layout="per_category_rows",
               fmt="csv") -> str:
    _check(results, layout, fmt)
    with_auc = any(r.auc is not None
                   for res in results for r in res.per_category.values())

    if layout == "per_category_rows":
        header = ["experiment", "category", *METRIC_HEADERS]
        if with_auc:
            header.append("AUC")
        body = []
        for name, category, report, error in _rows_long(results):
            if report is None:
                body.append([name, f"FAILED: {error}"] + [""] * (len(header) - 2))
                continue
            body.append([name, category]
                        + [_fmt_cell(v, fmt) for v in _metric_values(report, with_auc)])
    else:  # variant_columns: one row per category, (F-M, MCC, mIoU) per variant
        ok = [r for r in sorted(results, key=lambda r: r.name) if r.status == "ok"]
        if not ok:
            raise EvaluationError("no successful results to tabulate")
        categories = sorted({c for r in ok for c in r.per_category})
        header = ["category"]
        for r in ok:
            header += [f"{r.name}:F-Measure", f"{r.name}:MCC", f"{r.name}:mIoU"]
        body = []
        for category in categories:
            row = [category]
            for r in ok:
                report = r.per_category.get(category)
                if report is None:
                    row += ["", "", ""]
                else:
                    row += [_fmt_cell(report.f_measure, fmt),
                            _fmt_cell(report.mcc, fmt),
                            _fmt_cell(report.miou, fmt)]
            body.append(row)

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue()
    lines = ["| " + " | ".join(str(h) for h in header) + " |",
             "|" + "|".join(" --- " for _ in header) + "|"]
    for row in body:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return "\n".join(lines) + "\n"
