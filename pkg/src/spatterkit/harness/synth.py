"""Synthetic spatter patterns with exact ground truth.

Filled ellipses are rasterized without anti-aliasing (a pixel is set
iff its center lies inside the ellipse), on a white background, saved
as RGB with equal channels. Geometry is recorded per stain, so the
whole extraction pipeline can be checked against known truth. The two
class presets differ only in the stain area distribution, mirroring the
finding that mechanism classes separate primarily on stain size.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np
from PIL import Image

from ..ioutil import atomic_write_text
from .manifest import ManifestRecord, write_manifest


def rasterize_ellipse(shape: tuple[int, int], cx: float, cy: float,
                      major: float, minor: float,
                      orientation_deg: float) -> np.ndarray:
    """Boolean (H, W) mask of a filled ellipse, no anti-aliasing.

    Orientation is the major-axis angle in degrees, counterclockwise
    from the +x axis with y pointing up (the fitter's convention, so a
    render-then-fit round trip recovers the input angle).
    """
    h, w = shape
    if not (major > 0 and minor > 0 and minor <= major):
        raise ValueError("need 0 < minor <= major")
    a = major / 2.0
    b = minor / 2.0
    r0 = max(0, int(math.floor(cy - a)) - 1)
    r1 = min(h - 1, int(math.ceil(cy + a)) + 1)
    c0 = max(0, int(math.floor(cx - a)) - 1)
    c1 = min(w - 1, int(math.ceil(cx + a)) + 1)
    mask = np.zeros((h, w), dtype=bool)
    if r1 < r0 or c1 < c0:
        return mask
    rows = np.arange(r0, r1 + 1)
    cols = np.arange(c0, c1 + 1)
    dx = cols[None, :] - cx
    dy = -(rows[:, None] - cy)  # image rows grow downward
    th = math.radians(orientation_deg)
    u = dx * math.cos(th) + dy * math.sin(th)
    v = -dx * math.sin(th) + dy * math.cos(th)
    mask[r0:r1 + 1, c0:c1 + 1] = (u / a) ** 2 + (v / b) ** 2 <= 1.0
    return mask


@dataclass(frozen=True)
class StainDistribution:
    """Per-class sampling ranges for one synthetic stain population."""

    area_median_px: float = 14.0
    area_log_sd: float = 0.45
    axis_ratio: tuple[float, float] = (0.45, 0.9)
    orientation: tuple[float, float] = (-90.0, 90.0)
    stain_count: tuple[int, int] = (25, 45)
    intensity: tuple[int, int] = (20, 90)
    min_area_px: float = 8.0

    def __post_init__(self):
        lo, hi = self.axis_ratio
        if not (0 < lo <= hi <= 1):
            raise ValueError("axis ratio range must sit inside (0, 1]")
        if self.stain_count[0] < 1 or self.stain_count[0] > self.stain_count[1]:
            raise ValueError("stain count range must be positive and ordered")
        # guarantee minor axis >= 1 px for the smallest allowed stain
        if self.min_area_px * lo < math.pi / 4:
            raise ValueError("min_area_px too small: stains could collapse "
                             "below 1 px minor axis")


@dataclass(frozen=True)
class SynthSpec:
    patterns_per_class: int = 30
    image_size: tuple[int, int] = (1024, 1024)  # (width, height)
    dpi: float = 600.0
    seed: int = 0
    gunshot: StainDistribution = field(default_factory=StainDistribution)
    impact: StainDistribution = field(
        default_factory=lambda: StainDistribution(area_median_px=35.0)
    )
    distances_cm: tuple[float, ...] = (30.0, 60.0, 120.0)
    max_tries: int = 40
    center_sigma_frac: float = 0.18

    def __post_init__(self):
        if self.patterns_per_class < 1:
            raise ValueError("need at least one pattern per class")
        if self.image_size[0] < 32 or self.image_size[1] < 32:
            raise ValueError("image too small for a usable pattern")
        if not self.dpi > 0:
            raise ValueError("dpi must be positive")


@dataclass(frozen=True)
class GenerationResult:
    manifest_path: str
    truth_path: str
    records: list[ManifestRecord]


def _sample_stain(rng, dist: StainDistribution, w: int, h: int, sigma: float):
    area = math.exp(rng.normal(math.log(dist.area_median_px), dist.area_log_sd))
    area = max(area, dist.min_area_px)
    q = rng.uniform(*dist.axis_ratio)
    a = math.sqrt(area / (math.pi * q))
    b = q * a
    theta = rng.uniform(*dist.orientation)
    margin = a + 3.0
    cx = float(np.clip((w - 1) / 2.0 + rng.normal(0.0, sigma), margin, w - 1 - margin))
    cy = float(np.clip((h - 1) / 2.0 + rng.normal(0.0, sigma), margin, h - 1 - margin))
    level = int(rng.integers(dist.intensity[0], dist.intensity[1] + 1))
    return cx, cy, 2 * a, 2 * b, theta, level


def _render_pattern(rng, dist: StainDistribution, w: int, h: int,
                    sigma: float, max_tries: int):
    """One white canvas with non-overlapping stains plus their truth list."""
    canvas = np.full((h, w), 255, dtype=np.uint8)
    placed: list[tuple[float, float, float]] = []  # (cx, cy, semi-major)
    truth = []
    n_stains = int(rng.integers(dist.stain_count[0], dist.stain_count[1] + 1))
    for _ in range(n_stains):
        for _try in range(max_tries):
            cx, cy, major, minor, theta, level = _sample_stain(rng, dist, w, h, sigma)
            a = major / 2.0
            if any(math.hypot(cx - px, cy - py) < a + pa + 2.0
                   for px, py, pa in placed):
                continue
            mask = rasterize_ellipse((h, w), cx, cy, major, minor, theta)
            canvas[mask] = level
            placed.append((cx, cy, a))
            truth.append({
                "cx": cx, "cy": cy, "major": major, "minor": minor,
                "orientation_deg": theta, "intensity": level,
                "area_px": int(mask.sum()),
            })
            break
        # unplaceable stain after max_tries: drop it, pattern stays valid
    return canvas, truth


def generate(spec: SynthSpec, out_dir: str) -> GenerationResult:
    """Render both classes to PNG files plus manifest and truth JSON.

    Deterministic: the same spec (seed included) reproduces identical
    image bytes and identical manifest/truth content.
    """
    os.makedirs(out_dir, exist_ok=True)
    w, h = spec.image_size
    sigma = spec.center_sigma_frac * min(w, h)
    records: list[ManifestRecord] = []
    truth_patterns = []
    for class_idx, (label, dist) in enumerate(
        (("gunshot", spec.gunshot), ("impact", spec.impact))
    ):
        for pi in range(spec.patterns_per_class):
            rng = np.random.default_rng(
                np.random.SeedSequence((spec.seed, class_idx, pi))
            )
            canvas, truth = _render_pattern(rng, dist, w, h, sigma, spec.max_tries)
            name = f"{label}_{pi:04d}.png"
            path = os.path.join(out_dir, name)
            rgb = np.repeat(canvas[:, :, None], 3, axis=2)
            Image.fromarray(rgb, mode="RGB").save(path)
            bt = spec.distances_cm[pi % len(spec.distances_cm)]
            records.append(ManifestRecord(path=path, label=label,
                                          bt_distance_cm=bt, dpi=spec.dpi))
            truth_patterns.append({
                "path": name, "label": label, "bt_distance_cm": bt,
                "dpi": spec.dpi, "stains": truth,
            })

    manifest_path = os.path.join(out_dir, "manifest.csv")
    write_manifest(records, manifest_path, relative_to=out_dir)
    truth_path = os.path.join(out_dir, "truth.json")
    doc = {"spec": _spec_dict(spec), "patterns": truth_patterns}
    atomic_write_text(truth_path, json.dumps(doc, indent=2, sort_keys=True))
    return GenerationResult(manifest_path=manifest_path, truth_path=truth_path,
                            records=records)


def _spec_dict(spec: SynthSpec) -> dict:
    d = asdict(spec)
    d["image_size"] = list(spec.image_size)
    d["distances_cm"] = list(spec.distances_cm)
    return d
