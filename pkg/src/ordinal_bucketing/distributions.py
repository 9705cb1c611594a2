"""Synthetic sample sources on [0, 5] and Gaussian reward noise."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

LOW, HIGH = 0.0, 5.0

# (left, right, height) of the custom step density; heights are unnormalized
CUSTOM_STEPS = (
    (0.0, 0.25, 0.3),
    (0.25, 1.25, 0.0),
    (1.25, 2.5, 0.02),
    (2.5, 2.75, 0.5),
    (2.75, 3.0, 0.2),
    (3.0, 5.0, 0.125),
)

KINDS = ("gaussian", "exponential", "custom")


@dataclass(frozen=True)
class SourceSpec:
    kind: str = "gaussian"
    seed: int = 0
    mu: float = 2.5
    sigma: float = 1.0
    rate: float = 1.0
    steps: tuple = field(default=CUSTOM_STEPS)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "custom":
            if any(h < 0 for _, _, h in self.steps):
                raise ValueError("custom step heights must be nonnegative")
            if not any(h > 0 and r > l for l, r, h in self.steps):
                raise ValueError("custom step density has no mass")


def step_weights(steps=CUSTOM_STEPS) -> np.ndarray:
    """Probability of each step segment (height times width, normalized)."""
    mass = np.array([(r - l) * h for l, r, h in steps])
    return mass / mass.sum()


def _from_uniform(spec: SourceSpec, u: np.ndarray, u2: np.ndarray | None = None) -> np.ndarray:
    # inverse CDF restricted to [LOW, HIGH]
    if spec.kind == "gaussian":
        lo = ndtr((LOW - spec.mu) / spec.sigma)
        hi = ndtr((HIGH - spec.mu) / spec.sigma)
        x = spec.mu + spec.sigma * ndtri(lo + u * (hi - lo))
    elif spec.kind == "exponential":
        span = -np.expm1(-spec.rate * (HIGH - LOW))
        x = LOW - np.log1p(-u * span) / spec.rate
    else:
        w = step_weights(spec.steps)
        seg = np.minimum(np.searchsorted(np.cumsum(w), u, side="right"), len(w) - 1)
        left = np.array([s[0] for s in spec.steps])[seg]
        width = np.array([s[1] - s[0] for s in spec.steps])[seg]
        x = left + u2 * width
    return np.clip(x, LOW, HIGH)


def sample_stream(spec: SourceSpec, t: int) -> np.ndarray:
    """First ``t`` samples of the stream for ``spec``.

    The stream is a pure function of ``spec``: position ``i`` always holds
    the same value no matter how long a prefix is requested.
    """
    rng = np.random.default_rng([spec.seed, KINDS.index(spec.kind)])
    if spec.kind == "custom":
        uv = rng.random((t, 2))
        return _from_uniform(spec, uv[:, 0], uv[:, 1])
    return _from_uniform(spec, rng.random(t))


def sample(spec: SourceSpec, position: int) -> float:
    """Single value at ``position`` of the stream."""
    return float(sample_stream(spec, position + 1)[position])


def add_noise(true_score: float, sigma: float, rng) -> float:
    """``true_score`` plus one N(0, sigma) draw; exact identity at sigma 0.

    ``rng`` is a :class:`random.Random` or a :class:`numpy.random.Generator`.
    """
    if sigma < 0:
        raise ValueError(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return true_score
    if isinstance(rng, random.Random):
        return true_score + rng.gauss(0.0, sigma)
    return true_score + sigma * rng.standard_normal()
