"""On-line ordinal bucketing.

A :class:`Bucketing` summarizes a stream of totally ordered values with a
small, growing set of buckets.  Values are only ever compared, never added
or averaged, so any type with ``<`` and ``==`` works.

Three growth policies are available:

* :class:`FirstN` -- the first ``n`` distinct values become bucket bounds.
* :class:`KLogGrowing` -- one full-range bucket that is split at a pivot
  (median of the bucket's last ``m`` samples) whenever the number of
  buckets is below ``k * log(t)``.
* :class:`KLogGrowingFirstN` -- First-n until ``n`` bounds exist, then
  k-Log-Growing splits.

Every bucketing keeps an unbounded top bucket (``TOP``) as its last
element; values above every finite bound land there.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, Union


class _Top:
    """Sentinel upper bound above every ordinal value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


@dataclass(frozen=True)
class FirstN:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class KLogGrowing:
    k: float
    m: int = 3

    def __post_init__(self):
        _check_k_m(self.k, self.m)


@dataclass(frozen=True)
class KLogGrowingFirstN:
    k: float
    n: int
    m: int = 3

    def __post_init__(self):
        _check_k_m(self.k, self.m)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


Policy = Union[FirstN, KLogGrowing, KLogGrowingFirstN]


def _check_k_m(k, m):
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be a positive odd integer, got {m}")


class Bucket:
    """One interval ``(previous upper, upper]`` of the ordinal line.

    ``aux`` is a ring of the most recent ``m`` values stored here and is the
    pivot source.  ``max_seen`` is the largest value stored in the bucket and
    serves as the representative of the TOP bucket.
    """

    __slots__ = ("upper", "count", "aux", "max_seen")

    def __init__(self, upper: Any, m: int, count: int = 0, aux: Iterable = (), max_seen: Any = None):
        self.upper = upper
        self.count = count
        self.aux = deque(aux, maxlen=m)
        self.max_seen = max_seen

    @property
    def is_top(self) -> bool:
        return self.upper is TOP

    def __repr__(self):
        return f"Bucket(upper={self.upper!r}, count={self.count}, aux={list(self.aux)!r})"


def pivot(bucket: Bucket) -> Any:
    """Median of the bucket's last ``m`` samples, or ``None``.

    ``None`` means no split is possible: either fewer than ``m`` samples have
    been seen, or the median coincides with the bucket's upper bound
    (splitting there would produce an empty interval).  The TOP bucket uses
    the largest value it has seen as its bound.
    """
    m = bucket.aux.maxlen
    if not m or len(bucket.aux) < m:
        return None
    p = sorted(bucket.aux)[m // 2]
    if p == (bucket.max_seen if bucket.is_top else bucket.upper):
        return None
    return p


class Bucketing:
    """Streaming ordinal sketch.

    >>> b = Bucketing(FirstN(3))
    >>> for x in [5, 2, 2, 8]:
    ...     b.add(x)
    >>> b.quantile_estimates(), b.counts()
    ([2, 5, 8], [2, 1, 1, 0])
    """

    def __init__(self, policy: Policy, log_base: float = math.e, tie_break: str = "lowest", rng_seed: int = 0):
        if tie_break not in ("lowest", "random"):
            raise ValueError(f"unknown tie_break {tie_break!r}")
        self.policy = policy
        self.m = 0 if isinstance(policy, FirstN) else policy.m
        self.log_base = log_base
        self._log_scale = 1.0 / math.log(log_base)
        self.tie_break = tie_break
        self.rng_seed = rng_seed
        self._rng = random.Random(rng_seed) if tie_break == "random" else None
        self.buckets: list[Bucket] = [Bucket(TOP, self.m)]
        # finite uppers, kept parallel to buckets[:-1] for bisection
        self._uppers: list[Any] = []
        self.total = 0

    # -- queries -------------------------------------------------------

    def __len__(self):
        return len(self.buckets)

    @property
    def n_finite(self) -> int:
        """Number of buckets with a finite upper bound."""
        return len(self._uppers)

    def find_bucket(self, o: Any) -> int:
        """Index of the bucket covering ``o`` (first bucket with ``o <= upper``)."""
        return bisect_left(self._uppers, o)

    def counts(self) -> list[int]:
        return [b.count for b in self.buckets]

    def quantile_estimates(self) -> list:
        """Finite bucket bounds, ascending; ``q - 1`` cut points for ``q`` buckets."""
        return list(self._uppers)

    def bound(self, t: int | None = None) -> float:
        """Growth bound ``k * log(t)`` for the log-growing policies."""
        t = self.total if t is None else t
        if t <= 0:
            return 0.0
        return self.policy.k * math.log(t) * self._log_scale

    def bucketed_pmf(self) -> list[tuple[Any, float]]:
        """Collapse each non-empty bucket onto one representative value.

        Finite buckets are represented by their upper bound, the TOP bucket
        by the largest value it has seen.  Probabilities are ``count / total``.
        """
        if self.total == 0:
            raise ValueError("bucketed_pmf of an empty sketch")
        t = self.total
        out = []
        for b in self.buckets:
            if b.count:
                out.append((b.max_seen if b.is_top else b.upper, b.count / t))
        return out

    # -- updates -------------------------------------------------------

    def store(self, o: Any) -> None:
        """Record ``o`` in its containing bucket."""
        b = self.buckets[bisect_left(self._uppers, o)]
        b.count += 1
        if self.m:
            b.aux.append(o)
        if b.max_seen is None or b.max_seen < o:
            b.max_seen = o
        self.total += 1

    def _insert_bound(self, o: Any) -> bool:
        """Insert an empty bucket with upper bound ``o`` unless one exists."""
        i = bisect_left(self._uppers, o)
        if i < len(self._uppers) and self._uppers[i] == o:
            return False
        self._uppers.insert(i, o)
        self.buckets.insert(i, Bucket(o, self.m))
        return True

    def split_largest(self) -> bool:
        """Split the fullest bucket at its pivot.

        Among the buckets of maximal count, the one with the smallest upper
        bound that has a pivot is split (or a random one, with
        ``tie_break="random"``).  Returns ``False`` and leaves the sketch
        untouched when none of them has a pivot.
        """
        top_count = max(b.count for b in self.buckets)
        candidates = []
        for i, b in enumerate(self.buckets):
            if b.count == top_count:
                p = pivot(b)
                if p is not None:
                    candidates.append((i, p))
                    if self._rng is None:
                        break
        if not candidates:
            return False
        i, p = candidates[0] if self._rng is None else self._rng.choice(candidates)
        parent = self.buckets[i]
        low_aux = [x for x in parent.aux if x <= p]
        high_aux = [x for x in parent.aux if x > p]
        lower = Bucket(p, self.m, count=(parent.count + 1) // 2, aux=low_aux, max_seen=max(low_aux))
        parent.count //= 2
        parent.aux = deque(high_aux, maxlen=self.m)
        if not parent.is_top:
            parent.max_seen = max(high_aux) if high_aux else None
        self.buckets.insert(i, lower)
        self._uppers.insert(i, p)
        return True

    def add(self, o: Any) -> None:
        """Add one sample according to the configured policy."""
        policy = self.policy
        if isinstance(policy, KLogGrowing):
            self.add_k_log(o)
        elif isinstance(policy, KLogGrowingFirstN):
            self.add_k_log_first_n(o)
        else:
            self.add_first_n(o)

    def extend(self, values: Iterable) -> None:
        for o in values:
            self.add(o)

    def add_first_n(self, o: Any) -> None:
        if len(self._uppers) < self.policy.n:
            self._insert_bound(o)
        self.store(o)

    def add_k_log(self, o: Any) -> None:
        self.store(o)
        self._grow()

    def add_k_log_first_n(self, o: Any) -> None:
        n = self.policy.n
        if len(self._uppers) < n:
            self._insert_bound(o)
            self.store(o)
        else:
            self.store(o)
            self._grow()

    def _grow(self) -> None:
        limit = self.bound()
        while len(self._uppers) < limit and self.split_largest():
            pass

    # -- (de)serialization ----------------------------------------------

    def dumps(self) -> str:
        """Line-oriented text form: one ``upper;count;aux,...`` line per bucket."""
        lines = [f"# {_policy_str(self.policy)} total={self.total}"]
        for b in self.buckets:
            upper = "TOP" if b.is_top else repr(b.upper)
            aux = ",".join(repr(x) for x in b.aux)
            line = f"{upper};{b.count};{aux}"
            if b.is_top and b.max_seen is not None:
                line += f";{b.max_seen!r}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, **kwargs) -> "Bucketing":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = lines[0].lstrip("#").split()
        policy = _parse_policy(header[0])
        sketch = cls(policy, **kwargs)
        sketch.buckets = []
        sketch._uppers = []
        for ln in lines[1:]:
            fields = ln.split(";")
            aux = [_parse_value(x) for x in fields[2].split(",") if x]
            if fields[0] == "TOP":
                max_seen = _parse_value(fields[3]) if len(fields) > 3 else None
                sketch.buckets.append(Bucket(TOP, sketch.m, int(fields[1]), aux, max_seen))
            else:
                upper = _parse_value(fields[0])
                max_seen = max(aux) if aux else None
                sketch.buckets.append(Bucket(upper, sketch.m, int(fields[1]), aux, max_seen))
                sketch._uppers.append(upper)
        sketch.total = sum(b.count for b in sketch.buckets)
        return sketch

    def __repr__(self):
        return f"Bucketing({_policy_str(self.policy)}, total={self.total}, buckets={len(self.buckets)})"


def _policy_str(policy: Policy) -> str:
    if isinstance(policy, FirstN):
        return f"FirstN(n={policy.n})"
    if isinstance(policy, KLogGrowing):
        return f"KLogGrowing(k={policy.k},m={policy.m})"
    return f"KLogGrowingFirstN(k={policy.k},n={policy.n},m={policy.m})"


def _parse_policy(s: str) -> Policy:
    name, _, args = s.partition("(")
    kw = {}
    for part in args.rstrip(")").split(","):
        key, _, val = part.partition("=")
        kw[key] = _parse_value(val)
    return {"FirstN": FirstN, "KLogGrowing": KLogGrowing, "KLogGrowingFirstN": KLogGrowingFirstN}[name](**kw)


def _parse_value(s: str) -> Any:
    try:
        return int(s)
    except ValueError:
        return float(s)


def make_policy(name: str, k: float | None = None, n: int | None = None, m: int = 3) -> Policy:
    """Build a policy from its short name (``first_n``, ``k_log``, ``k_log_first_n``)."""
    if name == "first_n":
        return FirstN(n)
    if name == "k_log":
        return KLogGrowing(k, m)
    if name == "k_log_first_n":
        return KLogGrowingFirstN(k, n, m)
    raise ValueError(f"unknown policy {name!r}")


def space_bound(policy: Policy, t: int, log_base: float = math.e) -> int:
    """Maximum number of finite-bounded buckets allowed after ``t`` samples."""
    if isinstance(policy, FirstN):
        return policy.n
    grow = math.ceil(policy.k * math.log(t) / math.log(log_base)) if t > 0 else 0
    if isinstance(policy, KLogGrowing):
        return max(1, grow)
    return max(policy.n, grow)
