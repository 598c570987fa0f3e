"""Pattern-level features: consolidation over stains, bins, directional stats.

The registry below fixes the 48 feature names and their order for every
pattern in a run. Missing values are NaN throughout; they arise from
0/0 ratios in empty bin ranges and from degenerate normalizations, and
are serialized as empty CSV cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .stainfeat import StainFeatures, pattern_centroid, stain_distances

FEATURE_NAMES: tuple[str, ...] = (
    "num_stains",
    "mean_maj_length",
    "mean_min_length",
    "mean_area",
    "mean_ratio_dis",
    "sd_ratio_dis",
    "sd_epsilon",
    "sd_impact_angle",
    "mean_solidity",
    "sd_solidity",
    "num_large_1",
    "num_large_75",
    "ratio_large_1",
    "ratio_large_75",
    "fract1_ring_5_15",
    "fract1_ring_15_25",
    "fract1_ring_25_35",
    "fract75_ring_5_15",
    "fract75_ring_15_25",
    "fract75_ring_25_35",
    "adp_fract1_ring_15_25",
    "adp_fract1_ring_25_31",
    "adp_fract75_ring_15_25",
    "adp_fract75_ring_25_31",
    "num1_rec_5_15",
    "num1_rec_15_25",
    "num1_rec_25_35",
    "num75_rec_5_15",
    "num75_rec_15_25",
    "num75_rec_25_35",
    "fract1_rec_5_15",
    "fract1_rec_15_25",
    "fract1_rec_25_35",
    "fract75_rec_5_15",
    "fract75_rec_15_25",
    "fract75_rec_25_35",
    "i",
    "adp_i",
    "rec_i",
    "m",
    "adp_m",
    "rec_m",
    "rec_bin_ratio",
    "rec_adp_bin_ratio",
    "spheri_ratio",
    "spheri_det",
    "mean_shade",
    "mean_evenness",
)

BIN_COUNT = 40
FIXED_BIN_WIDTH_MM = 25.0
LARGE_RADIUS_1_MM = 0.1
LARGE_RADIUS_75_MM = 0.075


class TooFewStains(ValueError):
    """Raised when a pattern has fewer than two usable stains."""


@dataclass(frozen=True)
class BinningScheme:
    """Annulus rings around a center, or horizontal strips around a mid-line."""

    kind: str  # "annulus" | "rectangular"
    width: float  # px
    center: tuple[float, float]
    bin_count: int = BIN_COUNT

    def __post_init__(self):
        if self.kind not in ("annulus", "rectangular"):
            raise ValueError(f"unknown binning kind: {self.kind!r}")
        if not self.width > 0:
            raise ValueError(f"bin width must be positive, got {self.width}")


@dataclass(frozen=True)
class ScatterSummary:
    eigenvalues: tuple[float, float, float]  # t1 >= t2 >= t3 >= 0
    spheri_ratio: float  # t2 / t3, NaN when t3 == 0
    spheri_det: float  # t1 * t2 * t3


@dataclass(frozen=True)
class PatternMeta:
    pattern_id: str
    label: str
    bt_distance_cm: float
    resolution: float  # px per mm
    image_width: int
    image_height: int


@dataclass(frozen=True)
class PatternFeatures:
    """The named feature vector for one pattern."""

    meta: PatternMeta
    values: dict[str, float] = field(repr=False)

    def row(self) -> list[float]:
        return [self.values[name] for name in FEATURE_NAMES]


def consolidate(values, mode: str, condition=None):
    """Summarize per-stain values: mean, sd, count, ratio or index.

    ``condition`` (a boolean mask aligned with ``values``) is required
    for the count/ratio/index modes. SD is the population form. Empty
    input gives NaN mean/sd/ratio and count 0; index returns the
    0-based positions of the elements satisfying the condition.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if mode == "mean":
        return float(x.mean()) if n else math.nan
    if mode == "sd":
        return float(np.std(x)) if n else math.nan
    if mode in ("count", "ratio", "index"):
        if condition is None:
            raise ValueError(f"mode {mode!r} needs a condition mask")
        mask = np.asarray(condition, dtype=bool)
        if mask.shape != x.shape:
            raise ValueError("condition mask must align with values")
        if mode == "count":
            return int(mask.sum())
        if mode == "ratio":
            return float(mask.sum() / n) if n else math.nan
        return [int(i) for i in np.flatnonzero(mask)]
    raise ValueError(f"unknown consolidation mode: {mode!r}")


def angular_variance(angles_deg) -> float:
    """1 minus the mean resultant length of the angles, in [0, 1]."""
    a = np.radians(np.asarray(angles_deg, dtype=np.float64))
    if a.size == 0:
        return math.nan
    c = np.cos(a).mean()
    s = np.sin(a).mean()
    return float(1.0 - math.hypot(c, s))


def incident_vector(alpha: float, beta: float) -> np.ndarray:
    """Unit 3-vector of the incident direction for impact angle alpha and
    orientation beta (both radians)."""
    ca = math.cos(alpha)
    return np.array([-ca * math.cos(beta), -ca * math.sin(beta), math.sin(alpha)])


def scatter_summary(vectors) -> ScatterSummary | None:
    """Eigen-summary of T = sum of outer products of unit incident vectors.

    The trace of T equals the vector count; the determinant summarizes
    dispersion. Returns None for an empty vector set. spheri_ratio (the
    second-to-third eigenvalue ratio) is NaN when T is rank-deficient.
    """
    m = np.asarray(vectors, dtype=np.float64).reshape(-1, 3)
    if m.shape[0] == 0:
        return None
    t = m.T @ m
    eig = np.linalg.eigvalsh(t)[::-1]  # descending
    eig = np.maximum(eig, 0.0)
    t1, t2, t3 = (float(v) for v in eig)
    tol = 1e-12 * (t1 + t2 + t3)
    ratio = t2 / t3 if t3 > tol else math.nan
    return ScatterSummary(
        eigenvalues=(t1, t2, t3), spheri_ratio=ratio, spheri_det=t1 * t2 * t3
    )


def assign_bins(stains: list[StainFeatures], scheme: BinningScheme) -> np.ndarray:
    """Bin index (1..bin_count) per stain; 0 means beyond the last bin.

    Annulus bin j covers radial distance [(j-1) w, j w) from the scheme
    center; rectangular bin j covers |y - center_y| in the same range.
    """
    if scheme.kind == "annulus":
        cx, cy = scheme.center
        metric = np.array(
            [math.hypot(s.region.ellipse.centroid[0] - cx,
                        s.region.ellipse.centroid[1] - cy)
             for s in stains]
        )
    else:
        cy = scheme.center[1]
        metric = np.array(
            [abs(s.region.ellipse.centroid[1] - cy) for s in stains]
        )
    bins = np.floor(metric / scheme.width).astype(np.int64) + 1
    bins[bins > scheme.bin_count] = 0
    return bins


def _ratio_in_range(bins: np.ndarray, lo: int, hi: int, large: np.ndarray) -> float:
    # rings "lo to hi" cover radial distance [lo w, hi w), i.e. bins lo+1..hi
    sel = (bins > lo) & (bins <= hi)
    denom = int(sel.sum())
    if denom == 0:
        return math.nan
    return float(large[sel].sum() / denom)


def _count_in_range(bins: np.ndarray, lo: int, hi: int, large: np.ndarray) -> float:
    sel = (bins > lo) & (bins <= hi)
    return float(large[sel].sum())


def _top_bin(bins: np.ndarray, bin_count: int) -> tuple[float, float]:
    """Index of the most populated bin (smallest wins ties) and its count."""
    assigned = bins[bins > 0]
    if assigned.size == 0:
        return math.nan, 0.0
    counts = np.bincount(assigned, minlength=bin_count + 1)
    idx = int(np.argmax(counts[1:])) + 1
    return float(idx), float(counts[idx])


def build_feature_vector(stains: list[StainFeatures], meta: PatternMeta) -> PatternFeatures:
    """Assemble the 48-entry named feature vector for one pattern."""
    n = len(stains)
    if n < 2:
        raise TooFewStains(
            f"pattern {meta.pattern_id!r}: {n} stain(s) after filtering, need >= 2"
        )

    major = np.array([s.region.ellipse.major_axis_length for s in stains])
    minor = np.array([s.region.ellipse.minor_axis_length for s in stains])
    area = np.array([s.region.pixel_area for s in stains], dtype=np.float64)
    solidity = np.array([s.region.solidity for s in stains])
    shade = np.array([s.region.shade for s in stains])
    evenness = np.array([s.region.evenness for s in stains])
    epsilon = np.array([s.epsilon for s in stains])
    impact = np.array([s.impact_angle for s in stains])
    orient_deg = np.array([s.region.ellipse.orientation for s in stains])

    dist = np.array([s.distance for s in stains])
    ratio_dist = np.array([s.ratio_distance for s in stains])
    if not np.all(np.isfinite(dist)):
        center = pattern_centroid(stains)
        dist, ratio_dist = stain_distances(stains, center)

    res = meta.resolution
    thr1 = math.pi * (LARGE_RADIUS_1_MM * res) ** 2
    thr75 = math.pi * (LARGE_RADIUS_75_MM * res) ** 2
    large1 = area > thr1
    large75 = area > thr75

    v: dict[str, float] = {}
    v["num_stains"] = float(n)
    v["mean_maj_length"] = consolidate(major, "mean")
    v["mean_min_length"] = consolidate(minor, "mean")
    v["mean_area"] = consolidate(area, "mean")
    v["mean_ratio_dis"] = consolidate(ratio_dist, "mean")
    v["sd_ratio_dis"] = consolidate(ratio_dist, "sd")
    v["sd_epsilon"] = consolidate(epsilon, "sd")
    v["sd_impact_angle"] = consolidate(impact, "sd")
    v["mean_solidity"] = consolidate(solidity, "mean")
    v["sd_solidity"] = consolidate(solidity, "sd")
    v["num_large_1"] = float(consolidate(area, "count", large1))
    v["num_large_75"] = float(consolidate(area, "count", large75))
    v["ratio_large_1"] = consolidate(area, "ratio", large1)
    v["ratio_large_75"] = consolidate(area, "ratio", large75)

    fixed_w = FIXED_BIN_WIDTH_MM * res
    center = pattern_centroid(stains)
    ring_bins = assign_bins(stains, BinningScheme("annulus", fixed_w, center))

    for prefix, large in (("fract1", large1), ("fract75", large75)):
        for lo in (5, 15, 25):
            v[f"{prefix}_ring_{lo}_{lo + 10}"] = _ratio_in_range(
                ring_bins, lo, lo + 10, large
            )

    med = float(np.median(dist))
    adp_w = med / 20.0
    if adp_w > 0:
        adp_bins = assign_bins(stains, BinningScheme("annulus", adp_w, center))
    else:
        adp_bins = np.zeros(n, dtype=np.int64)
    for prefix, large in (("adp_fract1", large1), ("adp_fract75", large75)):
        for lo, hi in ((15, 25), (25, 31)):
            v[f"{prefix}_ring_{lo}_{hi}"] = (
                _ratio_in_range(adp_bins, lo, hi, large) if adp_w > 0 else math.nan
            )

    img_center = ((meta.image_width - 1) / 2.0, (meta.image_height - 1) / 2.0)
    rec_bins = assign_bins(stains, BinningScheme("rectangular", fixed_w, img_center))
    for prefix, large in (("num1", large1), ("num75", large75)):
        for lo in (5, 15, 25):
            v[f"{prefix}_rec_{lo}_{lo + 10}"] = _count_in_range(
                rec_bins, lo, lo + 10, large
            )
    for prefix, large in (("fract1", large1), ("fract75", large75)):
        for lo in (5, 15, 25):
            v[f"{prefix}_rec_{lo}_{lo + 10}"] = _ratio_in_range(
                rec_bins, lo, lo + 10, large
            )

    ring_i, ring_m = _top_bin(ring_bins, BIN_COUNT)
    rec_i, rec_m = _top_bin(rec_bins, BIN_COUNT)
    if adp_w > 0:
        adp_i, adp_m = _top_bin(adp_bins, BIN_COUNT)
    else:
        adp_i, adp_m = math.nan, math.nan
    v["i"] = ring_i
    v["adp_i"] = adp_i
    v["rec_i"] = rec_i
    v["m"] = ring_m
    v["adp_m"] = adp_m
    v["rec_m"] = rec_m
    v["rec_bin_ratio"] = ring_i / rec_i if _both(ring_i, rec_i) else math.nan
    v["rec_adp_bin_ratio"] = adp_i / rec_i if _both(adp_i, rec_i) else math.nan

    vectors = [incident_vector(a, math.radians(b)) for a, b in zip(impact, orient_deg)]
    summary = scatter_summary(vectors)
    v["spheri_ratio"] = summary.spheri_ratio if summary else math.nan
    v["spheri_det"] = summary.spheri_det if summary else math.nan

    v["mean_shade"] = consolidate(shade, "mean")
    v["mean_evenness"] = consolidate(evenness, "mean")

    assert set(v) == set(FEATURE_NAMES)
    return PatternFeatures(meta=meta, values=v)


def _both(a: float, b: float) -> bool:
    return not (math.isnan(a) or math.isnan(b))


def class_summary(patterns: list[PatternFeatures], feature_name: str) -> dict:
    """Boxplot data per class: five-number summary and 1.5 IQR outliers."""
    if feature_name not in FEATURE_NAMES:
        raise ValueError(f"unknown feature: {feature_name!r}")
    by_class: dict[str, list[float]] = {}
    missing: dict[str, int] = {}
    for p in patterns:
        x = p.values[feature_name]
        by_class.setdefault(p.meta.label, [])
        missing.setdefault(p.meta.label, 0)
        if math.isnan(x):
            missing[p.meta.label] += 1
        else:
            by_class[p.meta.label].append(x)

    out = {}
    for label in sorted(by_class):
        vals = np.array(by_class[label])
        if vals.size == 0:
            out[label] = {"empty": True, "n": 0, "n_missing": missing[label]}
            continue
        q1, med, q3 = (float(q) for q in np.percentile(vals, [25, 50, 75]))
        iqr = q3 - q1
        lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        outliers = sorted(float(x) for x in vals[(vals < lo) | (vals > hi)])
        out[label] = {
            "empty": False,
            "n": int(vals.size),
            "n_missing": missing[label],
            "min": float(vals.min()),
            "q1": q1,
            "median": med,
            "q3": q3,
            "max": float(vals.max()),
            "outliers": outliers,
        }
    return out
