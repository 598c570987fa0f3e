"""Classifiers, imputation and repeated-fit experiments."""

from .boosted import (
    BoostedModel,
    BoostedParams,
    raw_score_to_probability,
    sigmoid,
    train_boosted,
)
from .experiment import (
    DISTANCE_THRESHOLDS,
    EvaluationReport,
    SISReport,
    evaluate,
    grid_search,
    repeated_fits,
    sis,
)
from .forest import ForestModel, ForestParams, train_forest
from .matrix import (
    CLASS_TO_LABEL,
    LABEL_TO_CLASS,
    FeatureMatrix,
    knn_impute,
    matrix_to_json_dict,
    split_indices,
    split_train_test,
    zero_impute,
)
from .trees import TreeNode

__all__ = [
    "BoostedModel",
    "BoostedParams",
    "CLASS_TO_LABEL",
    "DISTANCE_THRESHOLDS",
    "EvaluationReport",
    "FeatureMatrix",
    "ForestModel",
    "ForestParams",
    "LABEL_TO_CLASS",
    "SISReport",
    "TreeNode",
    "evaluate",
    "grid_search",
    "knn_impute",
    "matrix_to_json_dict",
    "raw_score_to_probability",
    "repeated_fits",
    "sigmoid",
    "sis",
    "split_indices",
    "split_train_test",
    "train_boosted",
    "train_forest",
    "zero_impute",
]
