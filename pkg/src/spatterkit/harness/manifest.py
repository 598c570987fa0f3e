"""Dataset manifest: which images to process, with label, blood-to-target
distance and scan resolution per record.

CSV form has the exact header `path,label,bt_distance_cm,dpi`; a JSON
file holding a list of objects with the same keys is accepted as an
alternative. Paths must be unique, dpi positive, labels from the closed
set {gunshot, impact}.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass

from ..ioutil import atomic_write_text

LABELS = ("gunshot", "impact")
MANIFEST_HEADER = ("path", "label", "bt_distance_cm", "dpi")


@dataclass(frozen=True)
class ManifestRecord:
    path: str
    label: str
    bt_distance_cm: float
    dpi: float

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if not self.dpi > 0:
            raise ValueError(f"dpi must be positive, got {self.dpi}")
        if self.bt_distance_cm < 0:
            raise ValueError(f"bt_distance_cm must be >= 0, got {self.bt_distance_cm}")

    @property
    def resolution(self) -> float:
        """Pixels per mm."""
        return self.dpi / 25.4


def read_manifest(path: str) -> list[ManifestRecord]:
    if path.lower().endswith(".json"):
        records = _read_json(path)
    else:
        records = _read_csv(path)
    seen = set()
    for rec in records:
        if rec.path in seen:
            raise ValueError(f"{path}: duplicate image path {rec.path!r}")
        seen.add(rec.path)
    return records


def _read_csv(path: str) -> list[ManifestRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != MANIFEST_HEADER:
            raise ValueError(
                f"{path}: manifest header must be {','.join(MANIFEST_HEADER)}"
            )
        out = []
        for i, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 4:
                raise ValueError(f"{path}:{i}: expected 4 cells, got {len(rec)}")
            out.append(ManifestRecord(path=_resolve(rec[0], path), label=rec[1],
                                      bt_distance_cm=float(rec[2]),
                                      dpi=float(rec[3])))
    return out


def _read_json(path: str) -> list[ManifestRecord]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError(f"{path}: JSON manifest must be a list of records")
    out = []
    for rec in doc:
        missing = [k for k in MANIFEST_HEADER if k not in rec]
        if missing:
            raise ValueError(f"{path}: record missing keys {missing}")
        out.append(ManifestRecord(path=_resolve(str(rec["path"]), path),
                                  label=str(rec["label"]),
                                  bt_distance_cm=float(rec["bt_distance_cm"]),
                                  dpi=float(rec["dpi"])))
    return out


def _resolve(image_path: str, manifest_path: str) -> str:
    """Relative image paths are taken relative to the manifest file."""
    if os.path.isabs(image_path):
        return image_path
    return os.path.normpath(
        os.path.join(os.path.dirname(os.path.abspath(manifest_path)), image_path)
    )


def write_manifest(records: list[ManifestRecord], path: str,
                   relative_to: str | None = None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for rec in records:
        p = rec.path
        if relative_to is not None:
            p = os.path.relpath(p, relative_to)
        writer.writerow([p, rec.label, repr(rec.bt_distance_cm), repr(rec.dpi)])
    atomic_write_text(path, buf.getvalue())
