"""Exact quantiles of a recorded stream and the rank-gap error of a bucketing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .bucketing import Bucketing


@dataclass(frozen=True)
class ErrorReport:
    q: int
    per_boundary: list[float]
    E: float
    meta: dict = field(default_factory=dict, compare=False)

    CSV_HEADER = ("policy", "k", "n", "m", "t", "seed", "E")

    def csv_row(self) -> list:
        return [self.meta.get(key, "") for key in self.CSV_HEADER[:-1]] + [repr(self.E)]


def rank(samples: Sequence, o: Any) -> int:
    """Number of samples strictly below ``o``."""
    return sum(1 for x in samples if x < o)


def true_quantiles(samples: Sequence, q: int) -> list:
    """The ``q - 1`` exact ``q``-quantile cut points of ``samples``.

    Cut point ``i`` is the sorted element at zero-based index
    ``ceil(i * t / q) - 1``.  No interpolation is done.
    """
    t = len(samples)
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if t < 1:
        raise ValueError("empty stream")
    if q > t:
        raise ValueError(f"q={q} quantiles requested from only t={t} samples")
    ordered = sorted(samples)
    return [ordered[-(-i * t // q) - 1] for i in range(1, q)]


def bucketing_error(samples: Sequence, sketch: Bucketing) -> ErrorReport:
    """Mean normalized rank gap between sketch bounds and exact cut points.

    The TOP bucket pairs with the stream maximum and contributes zero; the
    sum is still divided by the total number of buckets ``q``.
    """
    q = len(sketch)
    if q < 2:
        raise ValueError("bucketing_error needs at least two buckets")
    ordered = np.sort(np.asarray(samples))
    t = len(ordered)
    if sketch.total != t:
        raise ValueError(f"sketch holds {sketch.total} samples but stream has {t}")
    if q > t:
        raise ValueError(f"q={q} quantiles requested from only t={t} samples")
    bounds = sketch.quantile_estimates()
    idx = [-(-i * t // q) - 1 for i in range(1, q)]
    cuts = ordered[idx]
    r_bounds = np.searchsorted(ordered, np.asarray(bounds), side="left")
    r_cuts = np.searchsorted(ordered, cuts, side="left")
    gaps = (np.abs(r_bounds - r_cuts) / t).tolist()
    gaps.append(0.0)
    return ErrorReport(q=q, per_boundary=gaps, E=math.fsum(gaps) / q)


def brute_force_quantiles(samples: Sequence, q: int) -> list:
    """Enumeration oracle for :func:`true_quantiles`.

    For each cut ``i`` every stream element is tried as a candidate; the
    smallest one whose count of elements ``<=`` it reaches ``i * t / q`` wins.
    """
    t = len(samples)
    out = []
    for i in range(1, q):
        best = None
        for cand in samples:
            at_most = sum(1 for x in samples if x <= cand)
            if at_most * q >= i * t and (best is None or cand < best):
                best = cand
        out.append(best)
    return out

