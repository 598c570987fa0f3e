"""Derived per-stain features: impact angle, tail-adjusted angle, distances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .regions import EllipseParams, StainRegion


@dataclass(frozen=True)
class StainFeatures:
    """A stain region plus its derived quantities."""

    region: StainRegion
    impact_angle: float  # radians in (0, pi/2]
    epsilon: float  # tail-adjusted axis ratio
    distance: float = math.nan  # px to the pattern centroid
    ratio_distance: float = math.nan  # distance / median pattern distance


def impact_angle(ellipse: EllipseParams) -> float:
    """Angle between drop trajectory and target: arcsin(minor / major)."""
    ratio = ellipse.minor_axis_length / ellipse.major_axis_length
    return math.asin(min(ratio, 1.0))


def adjusted_impact_angle(ellipse: EllipseParams, filled_area: float) -> float:
    """Axis ratio with the major axis rescaled by filled area / ellipse area.

    Long tails inflate the filled area relative to the fitted ellipse,
    which shrinks this ratio below minor/major.
    """
    if filled_area <= 0:
        raise ValueError(f"filled_area must be positive, got {filled_area}")
    major = ellipse.major_axis_length
    minor = ellipse.minor_axis_length
    ellipse_area = math.pi / 4.0 * major * minor
    major_adj = major * (filled_area / ellipse_area)
    return minor / major_adj


def pattern_centroid(stains: list[StainFeatures]) -> tuple[float, float]:
    """Componentwise median of the stain centroids."""
    if not stains:
        raise ValueError("pattern centroid needs at least one stain")
    xs = np.array([s.region.ellipse.centroid[0] for s in stains])
    ys = np.array([s.region.ellipse.centroid[1] for s in stains])
    return float(np.median(xs)), float(np.median(ys))


def stain_distances(
    stains: list[StainFeatures], centroid: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean distance of each stain to the pattern centroid.

    Returns (distances, ratio_distances) where ratio distances are
    normalized by the pattern's median distance. A zero median (all
    stains coincident with the centroid) leaves the ratios as NaN.
    """
    cx, cy = centroid
    d = np.array(
        [math.hypot(s.region.ellipse.centroid[0] - cx, s.region.ellipse.centroid[1] - cy)
         for s in stains],
        dtype=np.float64,
    )
    med = float(np.median(d)) if len(d) else 0.0
    if med > 0:
        ratio = d / med
    else:
        ratio = np.full_like(d, np.nan)
    return d, ratio


def derive_stain_features(stains: list[StainRegion]) -> list[StainFeatures]:
    """Attach impact angle, epsilon and centroid distances to each region."""
    feats = [
        StainFeatures(
            region=s,
            impact_angle=impact_angle(s.ellipse),
            epsilon=adjusted_impact_angle(s.ellipse, s.filled_area),
        )
        for s in stains
    ]
    if not feats:
        return feats
    center = pattern_centroid(feats)
    dist, ratio = stain_distances(feats, center)
    return [
        StainFeatures(
            region=f.region,
            impact_angle=f.impact_angle,
            epsilon=f.epsilon,
            distance=float(dist[i]),
            ratio_distance=float(ratio[i]),
        )
        for i, f in enumerate(feats)
    ]
