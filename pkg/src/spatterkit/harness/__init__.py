"""Batch pipeline: manifests, extraction, synthesis, experiments, CLI."""

from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    run_experiment,
)
from .manifest import LABELS, ManifestRecord, read_manifest, write_manifest
from .pipeline import (
    ErrorRecord,
    ExtractResult,
    SkipRecord,
    extract,
    extract_pattern,
    load_image,
)
from .synth import (
    GenerationResult,
    StainDistribution,
    SynthSpec,
    generate,
    rasterize_ellipse,
)

__all__ = [
    "ConfigError",
    "ErrorRecord",
    "ExperimentConfig",
    "ExperimentResult",
    "ExtractResult",
    "GenerationResult",
    "LABELS",
    "ManifestRecord",
    "SkipRecord",
    "StainDistribution",
    "SynthSpec",
    "extract",
    "extract_pattern",
    "generate",
    "load_image",
    "rasterize_ellipse",
    "read_manifest",
    "run_experiment",
    "write_manifest",
]
