"""Batch feature extraction: manifest in, feature matrix plus skip and
error records out.

Every manifest record lands in exactly one of three buckets: a feature
row, a skip record (pattern valid but fewer than 2 stains survive the
filter), or an error record (unreadable or malformed image). The run
always continues past per-file problems.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..imgproc import binarize, fill_holes, invert, label_components, to_gray
from ..learn.matrix import FeatureMatrix
from ..patternfeat import PatternFeatures, PatternMeta, TooFewStains, build_feature_vector
from ..regions import filter_stains, region_props
from ..stainfeat import derive_stain_features
from .manifest import ManifestRecord


@dataclass(frozen=True)
class SkipRecord:
    pattern_id: str
    path: str
    reason: str


@dataclass(frozen=True)
class ErrorRecord:
    pattern_id: str
    path: str
    message: str


@dataclass(frozen=True)
class ExtractResult:
    matrix: FeatureMatrix
    patterns: list[PatternFeatures]
    skips: list[SkipRecord]
    errors: list[ErrorRecord]

    def to_report_dict(self) -> dict:
        return {
            "n_patterns": len(self.patterns),
            "n_skipped": len(self.skips),
            "n_errors": len(self.errors),
            "skips": [vars(s) for s in self.skips],
            "errors": [vars(e) for e in self.errors],
        }


def load_image(path: str) -> np.ndarray:
    """Image file to a grayscale or RGB uint8 array."""
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        return np.asarray(im)


def extract_pattern(image: np.ndarray, meta: PatternMeta,
                    threshold: int | str = "auto") -> PatternFeatures:
    """Run one image through gray/invert/binarize/label/fill, fit and
    filter stains, and build the pattern's named feature vector.

    Raises TooFewStains when fewer than 2 stains survive filtering.
    """
    gray = to_gray(image)
    inv = invert(gray)
    bits = binarize(inv, threshold)
    labels = label_components(bits)
    filled = fill_holes(bits)
    stains = region_props(labels, inv, filled)
    kept = filter_stains(stains, meta.resolution)
    feats = derive_stain_features(kept)
    return build_feature_vector(feats, meta)


def extract(records: list[ManifestRecord],
            threshold: int | str = "auto") -> ExtractResult:
    """Process every manifest record; never aborts on a single file."""
    ids = _pattern_ids(records)
    patterns: list[PatternFeatures] = []
    skips: list[SkipRecord] = []
    errors: list[ErrorRecord] = []
    for rec, pid in zip(records, ids):
        try:
            image = load_image(rec.path)
        except (OSError, UnidentifiedImageError, ValueError) as exc:
            errors.append(ErrorRecord(pid, rec.path, f"unreadable image: {exc}"))
            continue
        h, w = image.shape[0], image.shape[1]
        meta = PatternMeta(pattern_id=pid, label=rec.label,
                           bt_distance_cm=rec.bt_distance_cm,
                           resolution=rec.resolution,
                           image_width=w, image_height=h)
        try:
            patterns.append(extract_pattern(image, meta, threshold))
        except TooFewStains as exc:
            skips.append(SkipRecord(pid, rec.path, str(exc)))
        except ValueError as exc:
            errors.append(ErrorRecord(pid, rec.path, f"malformed image: {exc}"))
    matrix = FeatureMatrix.from_patterns(patterns)
    return ExtractResult(matrix=matrix, patterns=patterns, skips=skips,
                         errors=errors)


def _pattern_ids(records: list[ManifestRecord]) -> list[str]:
    """File stem per record, disambiguated when stems collide."""
    stems = [os.path.splitext(os.path.basename(r.path))[0] for r in records]
    seen: dict[str, int] = {}
    out = []
    for stem in stems:
        if stems.count(stem) == 1:
            out.append(stem)
            continue
        k = seen.get(stem, 0)
        seen[stem] = k + 1
        out.append(f"{stem}#{k}")
    return out
