"""spatterkit: blood spatter pattern features and mechanism classification.

Scanned spatter patterns are segmented into stains, each stain is
summarized by an ellipse fit and shape measures, per-stain values are
consolidated into a named 48-entry feature vector per pattern, and two
tree ensembles (gradient boosting with native missing-value handling;
a random forest over imputed data) classify the generating mechanism:
gunshot backspatter (1) versus impact spatter (0).
"""

from .imgproc import (
    LabelMap,
    binarize,
    fill_holes,
    invert,
    label_components,
    otsu_threshold,
    to_gray,
)
from .kernels import BACKEND, available_backends
from .patternfeat import (
    FEATURE_NAMES,
    BinningScheme,
    PatternFeatures,
    PatternMeta,
    ScatterSummary,
    TooFewStains,
    angular_variance,
    assign_bins,
    build_feature_vector,
    class_summary,
    consolidate,
    incident_vector,
    scatter_summary,
)
from .regions import (
    EllipseParams,
    StainRegion,
    convex_area,
    convex_hull,
    filter_stains,
    fit_ellipse,
    region_props,
)
from .stainfeat import (
    StainFeatures,
    adjusted_impact_angle,
    derive_stain_features,
    impact_angle,
    pattern_centroid,
    stain_distances,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BinningScheme",
    "EllipseParams",
    "FEATURE_NAMES",
    "LabelMap",
    "PatternFeatures",
    "PatternMeta",
    "ScatterSummary",
    "StainFeatures",
    "StainRegion",
    "TooFewStains",
    "adjusted_impact_angle",
    "angular_variance",
    "assign_bins",
    "available_backends",
    "binarize",
    "build_feature_vector",
    "class_summary",
    "consolidate",
    "convex_area",
    "convex_hull",
    "derive_stain_features",
    "fill_holes",
    "filter_stains",
    "fit_ellipse",
    "impact_angle",
    "incident_vector",
    "invert",
    "label_components",
    "otsu_threshold",
    "pattern_centroid",
    "region_props",
    "scatter_summary",
    "to_gray",
    "__version__",
]
