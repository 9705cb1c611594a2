import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ordinal_bucketing.distributions import (
    CUSTOM_STEPS, KINDS, HIGH, LOW, SourceSpec, add_noise, sample, sample_stream, step_weights,
)


def test_custom_step_mass():
    mass = sum((r - l) * h for l, r, h in CUSTOM_STEPS)
    assert mass == pytest.approx(0.525)
    assert step_weights().sum() == pytest.approx(1.0)
    assert step_weights()[1] == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_stream_is_replayable(kind):
    spec = SourceSpec(kind, seed=4)
    first = [sample(spec, i) for i in range(10)]
    assert first == sample_stream(spec, 10).tolist()
    assert sample_stream(spec, 10).tolist() == sample_stream(spec, 10).tolist()


@pytest.mark.parametrize("kind", KINDS)
def test_prefix_stable(kind):
    spec = SourceSpec(kind, seed=9)
    assert sample_stream(spec, 1000)[:37].tolist() == sample_stream(spec, 37).tolist()


def test_kinds_use_distinct_streams():
    g = sample_stream(SourceSpec("gaussian", 1), 1000)
    e = sample_stream(SourceSpec("exponential", 1), 1000)
    assert not np.array_equal(np.argsort(g), np.argsort(e))


@pytest.mark.parametrize("kind", KINDS)
def test_support(kind):
    x = sample_stream(SourceSpec(kind, seed=2), 100_000)
    assert x.min() >= LOW and x.max() <= HIGH


def test_custom_segment_frequencies():
    x = sample_stream(SourceSpec("custom", seed=5), 100_000)
    edges = [CUSTOM_STEPS[0][0]] + [r for _, r, _ in CUSTOM_STEPS]
    freq = np.histogram(x, bins=edges)[0] / len(x)
    assert np.abs(freq - step_weights()).max() <= 0.01


def test_gaussian_median():
    x = sample_stream(SourceSpec("gaussian", seed=6), 100_000)
    assert abs(np.median(x) - 2.5) <= 0.02


def test_exponential_shape():
    x = sample_stream(SourceSpec("exponential", seed=7), 100_000)
    # truncated Exp(1) median: -log(1 - (1 - e^-5) / 2)
    assert abs(np.median(x) - (-np.log(1 - (1 - np.exp(-5)) / 2))) <= 0.02


def test_bad_specs():
    with pytest.raises(ValueError):
        SourceSpec("uniform")
    with pytest.raises(ValueError):
        SourceSpec("custom", steps=((0, 1, -1.0),))
    with pytest.raises(ValueError):
        SourceSpec("custom", steps=((0, 1, 0.0),))


def test_noise_identity_at_zero():
    assert add_noise(3, 0.0, random.Random(0)) == 3


def test_noise_rejects_negative_sigma():
    with pytest.raises(ValueError):
        add_noise(0.0, -1.0, random.Random(0))


def test_noise_draws_differ():
    rng = random.Random(1)
    assert add_noise(5.0, 10.0, rng) != add_noise(5.0, 10.0, rng)


@pytest.mark.parametrize("make_rng", [lambda: random.Random(2), lambda: np.random.default_rng(2)])
def test_noise_mean(make_rng):
    rng = make_rng()
    draws = [add_noise(0.0, 1.0, rng) for _ in range(100_000)]
    assert abs(np.mean(draws)) <= 0.02
    assert abs(np.std(draws) - 1.0) <= 0.02


@given(st.sampled_from(KINDS), st.integers(0, 2**32 - 1), st.integers(1, 300))
@settings(max_examples=60, deadline=None)
def test_same_seed_same_stream(kind, seed, t):
    a = sample_stream(SourceSpec(kind, seed), t)
    b = sample_stream(SourceSpec(kind, seed), t)
    assert a.tolist() == b.tolist()
    assert ((a >= LOW) & (a <= HIGH)).all()
