"""Per-region morphology: moment ellipses, solidity, tone, stain filtering.

Coordinates: a pixel at image row r, column c sits at point (x, y) =
(c, r). Orientation is reported in the y-up convention (counterclockwise
from the +x axis when the image is viewed the usual way), in degrees in
[-90, 90). Internally the fit therefore runs on (c, -r) points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .imgproc import LabelMap
from .kernels import label_image

MIN_IMPACT_ANGLE = math.pi / 18
MIN_SOLIDITY = 0.75
MAX_ECCENTRICITY = 0.3
MIN_AREA_FILL_RATIO = 0.95


@dataclass(frozen=True)
class EllipseParams:
    """Ellipse with the same normalized second central moments as a pixel set."""

    centroid: tuple[float, float]  # (x, y)
    major_axis_length: float
    minor_axis_length: float
    orientation: float  # degrees in [-90, 90)
    eccentricity: float


@dataclass(frozen=True)
class StainRegion:
    label: int
    pixel_area: int
    filled_area: int
    convex_area: int
    ellipse: EllipseParams
    solidity: float
    vertical_angle: float  # 90 - orientation, degrees
    shade: float  # mean inverted-gray intensity over the region
    evenness: float  # population SD of the same intensities


def fit_ellipse(points) -> EllipseParams:
    """Fit the moment-equivalent ellipse to a set of (x, y) pixel centers.

    Each pixel contributes the variance of a unit square (1/12) to the
    diagonal moments, which keeps single-pixel sets non-degenerate: one
    pixel yields major == minor == 2/sqrt(3).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        pts = pts.reshape(-1, 2)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("cannot fit an ellipse to an empty pixel set")

    x = pts[:, 0]
    y = pts[:, 1]
    cx = x.mean()
    cy = y.mean()
    dx = x - cx
    dy = y - cy
    uxx = dx @ dx / n + 1.0 / 12.0
    uyy = dy @ dy / n + 1.0 / 12.0
    uxy = dx @ dy / n

    common = math.sqrt((uxx - uyy) ** 2 + 4.0 * uxy * uxy)
    major = 2.0 * math.sqrt(2.0) * math.sqrt(uxx + uyy + common)
    minor = 2.0 * math.sqrt(2.0) * math.sqrt(max(uxx + uyy - common, 0.0))

    orientation = 0.5 * math.degrees(math.atan2(2.0 * uxy, uxx - uyy))
    if orientation == 90.0:
        orientation = -90.0

    ratio = minor / major
    eccentricity = math.sqrt(max(1.0 - ratio * ratio, 0.0))
    return EllipseParams(
        centroid=(float(cx), float(cy)),
        major_axis_length=float(major),
        minor_axis_length=float(minor),
        orientation=float(orientation),
        eccentricity=float(eccentricity),
    )


def convex_hull(points) -> np.ndarray:
    """Convex hull of integer points (Andrew's monotone chain), CCW order."""
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    uniq = np.unique(pts, axis=0)  # lexicographic sort
    if len(uniq) <= 2:
        return uniq

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in uniq[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=np.int64)


def convex_area(points) -> int:
    """Pixel count of the rasterized convex hull of integer pixel centers.

    A pixel belongs to the hull raster iff its center lies inside or on
    the hull polygon. Exact integer/rational scanline arithmetic makes
    the count independent of hull vertex order and float rounding, and
    guarantees every input pixel is counted (so solidity <= 1).
    """
    hull = convex_hull(points)
    m = len(hull)
    if m == 0:
        return 0
    xs = hull[:, 0]
    ys = hull[:, 1]
    ymin, ymax = int(ys.min()), int(ys.max())
    if ymin == ymax:
        return int(xs.max() - xs.min()) + 1

    total = 0
    edges = [
        (int(hull[i][0]), int(hull[i][1]),
         int(hull[(i + 1) % m][0]), int(hull[(i + 1) % m][1]))
        for i in range(m)
    ]
    for r in range(ymin, ymax + 1):
        # hull cross-section at row r as exact fractions (num, den>0)
        lo_n = lo_d = hi_n = hi_d = None
        for x1, y1, x2, y2 in edges:
            if y1 == y2:
                if y1 != r:
                    continue
                cand = [(x1, 1), (x2, 1)]
            elif min(y1, y2) <= r <= max(y1, y2):
                num = x1 * (y2 - y1) + (x2 - x1) * (r - y1)
                den = y2 - y1
                if den < 0:
                    num, den = -num, -den
                cand = [(num, den)]
            else:
                continue
            for num, den in cand:
                if lo_n is None or num * lo_d < lo_n * den:
                    lo_n, lo_d = num, den
                if hi_n is None or num * hi_d > hi_n * den:
                    hi_n, hi_d = num, den
        if lo_n is None:
            continue
        x_first = -((-lo_n) // lo_d)  # ceil
        x_last = hi_n // hi_d  # floor
        if x_last >= x_first:
            total += x_last - x_first + 1
    return total


def region_props(labelmap: LabelMap, gray: np.ndarray, filled: np.ndarray) -> list[StainRegion]:
    """Compute one :class:`StainRegion` per labeled component.

    ``gray`` must be the inverted grayscale image (stains bright) and
    ``filled`` the hole-filled binary image; filled area is the size of
    the hole-filled component containing the region.
    """
    labels = labelmap.labels
    if gray.shape != labels.shape or filled.shape != labels.shape:
        raise ValueError(
            f"raster dimensions differ: labels {labels.shape}, "
            f"gray {gray.shape}, filled {filled.shape}"
        )
    n = labelmap.region_count
    if n == 0:
        return []

    h, w = labels.shape
    flat = labels.ravel()
    fg = np.flatnonzero(flat)
    order = np.argsort(flat[fg], kind="stable")  # stable: raster order kept per label
    sorted_idx = fg[order]
    sorted_lab = flat[fg][order]
    bounds = np.searchsorted(sorted_lab, np.arange(1, n + 2))

    rows_all = sorted_idx // w
    cols_all = sorted_idx % w
    gray_flat = np.asarray(gray, dtype=np.float64).ravel()

    filled_labels, _ = label_image(np.asarray(filled, dtype=np.uint8), connectivity=8)
    filled_sizes = np.bincount(filled_labels.ravel())
    filled_flat = filled_labels.ravel()

    out: list[StainRegion] = []
    for k in range(1, n + 1):
        s, e = int(bounds[k - 1]), int(bounds[k])
        rows = rows_all[s:e]
        cols = cols_all[s:e]
        pts = np.column_stack((cols, -rows)).astype(np.float64)
        fit = fit_ellipse(pts)
        ellipse = replace(fit, centroid=(fit.centroid[0], -fit.centroid[1]))

        # hull candidates: per-row extreme columns (rows are sorted)
        row_starts = np.searchsorted(rows, np.unique(rows))
        min_c = np.minimum.reduceat(cols, row_starts)
        max_c = np.maximum.reduceat(cols, row_starts)
        uniq_rows = rows[row_starts]
        hull_pts = np.column_stack(
            (np.concatenate((min_c, max_c)), np.concatenate((uniq_rows, uniq_rows)))
        )
        carea = convex_area(hull_pts)

        vals = gray_flat[sorted_idx[s:e]]
        shade = float(vals.mean())
        evenness = float(np.std(vals))

        pixel_area = e - s
        farea = int(filled_sizes[filled_flat[sorted_idx[s]]])
        out.append(
            StainRegion(
                label=k,
                pixel_area=pixel_area,
                filled_area=farea,
                convex_area=carea,
                ellipse=ellipse,
                solidity=pixel_area / carea,
                vertical_angle=90.0 - ellipse.orientation,
                shade=shade,
                evenness=evenness,
            )
        )
    return out


def filter_stains(
    stains: list[StainRegion],
    resolution: float,
    eccentricity_criterion: bool = True,
) -> list[StainRegion]:
    """Drop unwanted fitted ellipses; keep the rest in their original order.

    A stain is removed when any of these holds:

    1. eccentricity <= 0.3 (near-circular; toggled by
       ``eccentricity_criterion`` for sensitivity studies),
    2. impact angle < pi/18,
    3. solidity < 0.75,
    4. circle area on the minor axis exceeds the filled area,
    5. pixel area / filled area < 0.95 (overlapping stains).
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    kept = []
    for s in stains:
        if not _remove_stain(s, eccentricity_criterion):
            kept.append(s)
    return kept


def _remove_stain(s: StainRegion, eccentricity_criterion: bool) -> bool:
    e = s.ellipse
    if eccentricity_criterion and e.eccentricity <= MAX_ECCENTRICITY:
        return True
    ratio = min(e.minor_axis_length / e.major_axis_length, 1.0)
    if math.asin(ratio) < MIN_IMPACT_ANGLE:
        return True
    if s.solidity < MIN_SOLIDITY:
        return True
    if math.pi * (e.minor_axis_length / 2.0) ** 2 / s.filled_area > 1.0:
        return True
    if s.pixel_area / s.filled_area < MIN_AREA_FILL_RATIO:
        return True
    return False
