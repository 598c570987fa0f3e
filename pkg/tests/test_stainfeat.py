"""Per-stain features: impact angle, adjusted angle ratio, distances."""

import math

import numpy as np
import pytest

from spatterkit.regions import EllipseParams, StainRegion
from spatterkit.stainfeat import (
    StainFeatures,
    adjusted_impact_angle,
    derive_stain_features,
    impact_angle,
    pattern_centroid,
    stain_distances,
)


def make_region(cx=0.0, cy=0.0, major=10.0, minor=5.0, filled_area=None):
    if filled_area is None:
        # exactly the ellipse area, so the adjustment factor is 1
        filled_area = math.pi / 4.0 * major * minor
    e = EllipseParams(centroid=(cx, cy), major_axis_length=major,
                      minor_axis_length=minor, orientation=0.0,
                      eccentricity=math.sqrt(1 - (minor / major) ** 2))
    return StainRegion(label=1, pixel_area=int(filled_area),
                       filled_area=filled_area, convex_area=int(filled_area),
                       ellipse=e, solidity=1.0, vertical_angle=90.0,
                       shade=100.0, evenness=5.0)


def make_features(cx, cy, **kw) -> StainFeatures:
    region = make_region(cx, cy, **kw)
    return StainFeatures(region=region, impact_angle=impact_angle(region.ellipse),
                         epsilon=1.0)


class TestImpactAngle:
    def test_arcsin_of_axis_ratio(self):
        e = make_region(major=10.0, minor=5.0).ellipse
        assert impact_angle(e) == math.asin(0.5)

    def test_circle_is_ninety_degrees(self):
        e = make_region(major=8.0, minor=8.0).ellipse
        assert impact_angle(e) == math.pi / 2

    def test_ratio_clamped_against_rounding(self):
        e = EllipseParams(centroid=(0, 0), major_axis_length=5.0,
                          minor_axis_length=5.0 * (1 + 1e-16), orientation=0.0,
                          eccentricity=0.0)
        assert impact_angle(e) == math.pi / 2


class TestAdjustedImpactAngle:
    def test_equal_areas_leave_ratio_unchanged(self):
        region = make_region(major=10.0, minor=5.0)
        eps = adjusted_impact_angle(region.ellipse, region.filled_area)
        assert math.isclose(eps, 0.5, rel_tol=1e-12)

    def test_filled_area_scales_major_axis(self):
        # filled twice the ellipse area doubles the adjusted major axis
        region = make_region(major=10.0, minor=5.0)
        ellipse_area = math.pi / 4.0 * 10.0 * 5.0
        eps = adjusted_impact_angle(region.ellipse, 2.0 * ellipse_area)
        assert math.isclose(eps, 0.25, rel_tol=1e-12)

    def test_rejects_nonpositive_area(self):
        region = make_region()
        with pytest.raises(ValueError):
            adjusted_impact_angle(region.ellipse, 0.0)


class TestPatternCentroid:
    def test_componentwise_median_odd(self):
        stains = [make_features(0.0, 0.0), make_features(10.0, 2.0),
                  make_features(4.0, 8.0)]
        assert pattern_centroid(stains) == (4.0, 2.0)

    def test_componentwise_median_even(self):
        stains = [make_features(0.0, 0.0), make_features(2.0, 4.0)]
        assert pattern_centroid(stains) == (1.0, 2.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            pattern_centroid([])


class TestStainDistances:
    def test_ratio_is_distance_over_median(self):
        stains = [make_features(0.0, 0.0), make_features(3.0, 4.0),
                  make_features(6.0, 8.0)]
        d, ratio = stain_distances(stains, (0.0, 0.0))
        assert d.tolist() == [0.0, 5.0, 10.0]
        assert ratio.tolist() == [0.0, 1.0, 2.0]

    def test_zero_median_gives_missing_ratios(self):
        stains = [make_features(1.0, 1.0), make_features(1.0, 1.0),
                  make_features(9.0, 1.0)]
        d, ratio = stain_distances(stains, (1.0, 1.0))
        assert d.tolist() == [0.0, 0.0, 8.0]
        assert np.isnan(ratio).all()


class TestDeriveStainFeatures:
    def test_populates_all_fields(self):
        regions = [make_region(0.0, 0.0), make_region(6.0, 8.0),
                   make_region(3.0, 4.0)]
        feats = derive_stain_features(regions)
        assert [f.region for f in feats] == regions
        for f in feats:
            assert f.impact_angle == math.asin(0.5)
            assert math.isclose(f.epsilon, 0.5, rel_tol=1e-12)
            assert np.isfinite(f.distance)
        # centroid is the componentwise median (3, 4)
        d = [f.distance for f in feats]
        assert d[2] == 0.0
        assert d[0] == d[1] == 5.0
        ratios = [f.ratio_distance for f in feats]
        assert ratios[0] == 1.0

    def test_empty_input(self):
        assert derive_stain_features([]) == []
