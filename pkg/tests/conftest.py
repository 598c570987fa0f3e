"""Shared fixtures: one session-wide synthetic dataset and its features.

The two classes differ only in the stain area distribution, so the
dataset doubles as the end-to-end oracle for separation and SIS tests.
"""

import numpy as np
import pytest

from spatterkit.harness.manifest import read_manifest
from spatterkit.harness.pipeline import extract
from spatterkit.harness.synth import SynthSpec, generate

SYNTH_SEED = 2024


@pytest.fixture(scope="session")
def synth_result(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthdata")
    spec = SynthSpec(patterns_per_class=30, seed=SYNTH_SEED)
    return generate(spec, str(out))


@pytest.fixture(scope="session")
def extract_result(synth_result):
    records = read_manifest(synth_result.manifest_path)
    result = extract(records)
    assert not result.errors, [e.message for e in result.errors]
    return result


@pytest.fixture(scope="session")
def synth_matrix(extract_result):
    m = extract_result.matrix
    assert m.n_rows >= 50
    return m


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """Six small patterns: fast input for harness and CLI tests."""
    from spatterkit.harness.synth import StainDistribution

    out = tmp_path_factory.mktemp("tinydata")
    spec = SynthSpec(
        patterns_per_class=3,
        image_size=(256, 256),
        seed=99,
        gunshot=StainDistribution(stain_count=(6, 9)),
        impact=StainDistribution(area_median_px=35.0, stain_count=(6, 9)),
    )
    return generate(spec, str(out))


@pytest.fixture(scope="session")
def tiny_features_csv(tiny_corpus, tmp_path_factory):
    records = read_manifest(tiny_corpus.manifest_path)
    result = extract(records)
    assert not result.errors and not result.skips
    path = tmp_path_factory.mktemp("tinyfeat") / "features.csv"
    result.matrix.to_csv(str(path))
    return str(path)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
