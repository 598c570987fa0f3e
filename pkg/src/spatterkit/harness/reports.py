"""Deterministic report serialization.

All writers go through the atomic text writer, JSON is emitted with
sorted keys, and floats are rendered by repr, so rerunning an identical
experiment reproduces every report file byte for byte. NaN never
reaches JSON: missing values are converted to null.
"""

from __future__ import annotations

import csv
import io
import json
import math

from ..ioutil import atomic_write_text
from ..learn.experiment import EvaluationReport, SISReport


def scrub(obj):
    """Recursively replace NaN/inf floats with None for strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: scrub(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [scrub(v) for v in obj]
    return obj


def write_json(obj, path: str) -> None:
    text = json.dumps(scrub(obj), indent=2, sort_keys=True, allow_nan=False)
    atomic_write_text(path, text + "\n")


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def write_evaluation_csv(report: EvaluationReport, path: str) -> None:
    """Per-fit rows plus a trailing mean row."""
    keys = [f"d<={int(t) if float(t).is_integer() else t}" for t in report.thresholds]
    header = ["fit", "n_test", "accuracy"] + keys
    rows = []
    for fit in report.fits:
        rows.append([fit["fit"], fit["n_test"], _num(fit["accuracy"])]
                    + [_num(fit["subsets"][k]) for k in keys])
    rows.append(["mean", "", _num(report.mean_accuracy)]
                + [_num(report.mean_subsets[k]) for k in keys])
    atomic_write_text(path, _csv_text(header, rows))


def write_sis_csv(report: SISReport, path: str) -> None:
    header = ["feature", "count", "sis"]
    rows = [[name, count, _num(count / report.n_fits)]
            for name, count in zip(report.feature_names, report.counts)]
    atomic_write_text(path, _csv_text(header, rows))


def write_evaluation_json(report: EvaluationReport, path: str,
                          extra: dict | None = None) -> None:
    doc = report.to_dict()
    if extra:
        doc.update(extra)
    write_json(doc, path)


def write_sis_json(report: SISReport, path: str,
                   extra: dict | None = None) -> None:
    doc = report.to_dict()
    if extra:
        doc.update(extra)
    write_json(doc, path)
