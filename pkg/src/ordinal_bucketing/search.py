"""Monte Carlo tree search with numeric (UCT) or ordinal (dominance) action values.

Ordinal variants rate an action by its dominance: the mean, over all
sibling actions, of the tie-normalized probability that a random reward of
this action beats a random reward of the sibling.  The reward distribution
of an action is either an exact tally of every value seen, or a
:class:`~ordinal_bucketing.bucketing.Bucketing` sketch collapsed onto bucket
representatives.
"""
from __future__ import annotations

import json
import logging
import math
import random
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .bucketing import Bucketing, FirstN, KLogGrowing, KLogGrowingFirstN
from .distributions import add_noise
from .environments import RUNNING, WIN, GridGame, GameState, terminal_value

logger = logging.getLogger(__name__)

VARIANTS = ("MCTS", "OMCTS-exact", "OMCTS-Fix2", "OMCTS-2Log", "OMCTS-2Log3")

# bucketing policy behind each sketch-backed variant
SKETCH_POLICIES = {
    "OMCTS-Fix2": FirstN(2),
    "OMCTS-2Log": KLogGrowing(2, 3),
    "OMCTS-2Log3": KLogGrowingFirstN(2, 3, 3),
}


@dataclass(frozen=True)
class SearchConfig:
    variant: str = "OMCTS-exact"
    C: float = 0.5
    budget: int = 300
    rollout_depth: int = 15
    win_bonus: float = 1000.0
    loss_penalty: float = 1000.0
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.C < 0:
            raise ValueError("C must be >= 0")
        if self.rollout_depth < 0:
            raise ValueError("rollout_depth must be >= 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    @property
    def ordinal(self) -> bool:
        return self.variant != "MCTS"


# -- pairwise comparison of discrete distributions ---------------------------

def prob_beats(f_a: Sequence[tuple[Any, float]], f_b: Sequence[tuple[Any, float]]) -> float:
    """Tie-normalized probability ``Pr(A > B) + Pr(A = B) / 2``.

    ``f_a`` and ``f_b`` are ``(value, weight)`` pairs sorted by value with
    distinct values.  Weights are normalized by their totals, so raw counts
    work as well as probabilities; integer counts give an exactly rounded
    result.  One merge pass, linear in the two sizes.
    """
    if not f_a or not f_b:
        raise ValueError("prob_beats needs two nonempty distributions")
    num2 = 0  # twice the numerator, exact for integer weights
    below = 0  # weight of f_b strictly below the current value of f_a
    j, nb = 0, len(f_b)
    for x, wa in f_a:
        while j < nb and f_b[j][0] < x:
            below += f_b[j][1]
            j += 1
        tie = f_b[j][1] if j < nb and f_b[j][0] == x else 0
        num2 += wa * (2 * below + tie)
    total_a = sum(w for _, w in f_a)
    total_b = sum(w for _, w in f_b)
    return num2 / (2 * total_a * total_b)


def prob_beats_brute(f_a, f_b) -> float:
    """Double-loop reference for :func:`prob_beats`."""
    win = tie = 0.0
    for x, wa in f_a:
        for y, wb in f_b:
            if x > y:
                win += wa * wb
            elif x == y:
                tie += wa * wb
    total = sum(w for _, w in f_a) * sum(w for _, w in f_b)
    return (win + 0.5 * tie) / total


def dominance(probs: Sequence[Sequence[float]], a: int) -> float:
    """Mean probability of ``a`` beating each sibling, from a pairwise matrix."""
    k = len(probs)
    if k < 2:
        raise ValueError("dominance needs at least two actions")
    row = probs[a]
    return sum(row[b] for b in range(k) if b != a) / (k - 1)


def dominance_from_pmfs(pmfs: Sequence, a: int) -> float:
    """:func:`dominance` computed directly from per-action distributions."""
    k = len(pmfs)
    if k < 2:
        raise ValueError("dominance needs at least two actions")
    return sum(prob_beats(pmfs[a], pmfs[b]) for b in range(k) if b != a) / (k - 1)


# -- per-node statistics -----------------------------------------------------

class MeanStats:
    """Running mean per action, normalized by the range of observed values."""

    def __init__(self, k: int):
        self.sums = [0.0] * k
        self.counts = [0] * k
        self.lo = math.inf
        self.hi = -math.inf

    def update(self, a: int, v: float) -> None:
        self.sums[a] += v
        self.counts[a] += 1
        if v < self.lo:
            self.lo = v
        if v > self.hi:
            self.hi = v

    def means(self) -> list[float]:
        return [s / c if c else 0.0 for s, c in zip(self.sums, self.counts)]

    def exploitation(self) -> list[float]:
        span = self.hi - self.lo
        if span <= 0:
            return [0.5] * len(self.sums)
        lo = self.lo
        return [(s / c - lo) / span if c else 0.0 for s, c in zip(self.sums, self.counts)]


class _OrdinalStats:
    """Pairwise win-probability cache shared by the ordinal backends."""

    def __init__(self, k: int):
        self.k = k
        self.counts = [0] * k
        self.probs = [[0.5] * k for _ in range(k)]

    def exploitation(self) -> list[float]:
        self._refresh()
        return [dominance(self.probs, a) for a in range(self.k)]

    def _refresh(self) -> None:
        pass


class ExactTallyStats(_OrdinalStats):
    """Every observed value is kept; pairwise counts are updated incrementally.

    ``wins2[a][b]`` holds twice the number of (reward of a, reward of b)
    pairs won by ``a``, counting ties as half -- the same integer numerator
    :func:`prob_beats` produces from the tallies.
    """

    def __init__(self, k: int):
        super().__init__(k)
        self.values = [[] for _ in range(k)]
        self.wins2 = [[0] * k for _ in range(k)]

    def update(self, a: int, v) -> None:
        values, wins2, counts = self.values, self.wins2, self.counts
        for b in range(self.k):
            if b == a or not counts[b]:
                continue
            vb = values[b]
            less = bisect_left(vb, v)
            leq = bisect_right(vb, v)
            tie = leq - less
            wins2[a][b] += 2 * less + tie
            wins2[b][a] += 2 * (counts[b] - leq) + tie
        insort(values[a], v)
        counts[a] += 1
        na = counts[a]
        pa, pw = self.probs[a], wins2[a]
        for b in range(self.k):
            nb = counts[b]
            if b != a and nb:
                pa[b] = pw[b] / (2 * na * nb)
                self.probs[b][a] = wins2[b][a] / (2 * nb * na)

    def pmf(self, a: int) -> list[tuple[Any, int]]:
        out: list = []
        for v in self.values[a]:
            if out and out[-1][0] == v:
                out[-1][1] += 1
            else:
                out.append([v, 1])
        return [(v, c) for v, c in out]


class SketchStats(_OrdinalStats):
    """One bucketing per action; pairwise rows recomputed lazily after updates."""

    def __init__(self, k: int, policy):
        super().__init__(k)
        self.sketches = [Bucketing(policy) for _ in range(k)]
        self._dirty: set[int] = set()

    def update(self, a: int, v) -> None:
        self.sketches[a].add(v)
        self.counts[a] += 1
        self._dirty.add(a)

    def pmf(self, a: int) -> list[tuple[Any, int]]:
        """Bucket representatives with raw counts (``bucketed_pmf`` times total)."""
        out = []
        for b in self.sketches[a].buckets:
            if b.count:
                out.append((b.max_seen if b.is_top else b.upper, b.count))
        return out

    def _refresh(self) -> None:
        if not self._dirty:
            return
        pmfs = [self.pmf(a) if self.counts[a] else None for a in range(self.k)]
        probs = self.probs
        for a in self._dirty:
            for b in range(self.k):
                if b != a and pmfs[b] is not None:
                    p = prob_beats(pmfs[a], pmfs[b])
                    probs[a][b] = p
                    # computed separately so both directions match prob_beats exactly
                    probs[b][a] = prob_beats(pmfs[b], pmfs[a])
        self._dirty.clear()


def make_stats(variant: str, k: int):
    if variant == "MCTS":
        return MeanStats(k)
    if variant == "OMCTS-exact":
        return ExactTallyStats(k)
    return SketchStats(k, SKETCH_POLICIES[variant])


class SearchNode:
    """Tree node; only the root carries a game state (open-loop search)."""

    __slots__ = ("stats", "n", "n_a", "children", "state")

    def __init__(self, variant: str, k: int, state: GameState | None = None):
        self.stats = make_stats(variant, k)
        self.n = 0
        self.n_a = [0] * k
        self.children: list[SearchNode | None] = [None] * k
        self.state = state

    def update(self, a: int, v) -> None:
        self.stats.update(a, v)
        self.n += 1
        self.n_a[a] += 1

    def values(self) -> list[float]:
        """Exploitation term per action (dominance or normalized mean)."""
        return self.stats.exploitation()


def select_action(node: SearchNode, cfg: SearchConfig) -> int:
    """Unvisited actions first (lowest index), then the UCT-style argmax."""
    n_a = node.n_a
    k = len(n_a)
    if k == 0:
        raise ValueError("node has no actions")
    for a in range(k):
        if n_a[a] == 0:
            return a
    if k == 1:
        return 0
    exploit = node.stats.exploitation()
    scale = 2.0 * cfg.C
    log_n2 = 2.0 * math.log(node.n)
    best, best_score = 0, -math.inf
    for a in range(k):
        score = exploit[a] + scale * math.sqrt(log_n2 / n_a[a])
        if score > best_score:
            best, best_score = a, score
    return best


def recommend(root: SearchNode) -> int:
    """Most visited action, lowest index on ties."""
    n_a = root.n_a
    if not n_a or max(n_a) == 0:
        raise ValueError("no action has been visited")
    return n_a.index(max(n_a))


class Searcher:
    """Runs iterations on one tree; owns the search and observation-noise RNGs."""

    def __init__(self, game: GridGame, cfg: SearchConfig, rng: random.Random | None = None,
                 noise_rng: random.Random | None = None, reward_map=None):
        self.game = game
        self.cfg = cfg
        self.actions = game.actions
        self.rng = rng or random.Random(cfg.seed)
        self.noise_rng = noise_rng or random.Random(cfg.seed + 1)
        # optional transform of observed values, e.g. a monotone map
        self.reward_map = reward_map
        # set to a list to record the root action of every iteration
        self.trace: list[int] | None = None

    def new_root(self, state: GameState) -> SearchNode:
        return SearchNode(self.cfg.variant, len(self.actions), state=state)

    def run_iteration(self, root: SearchNode) -> float:
        """One selection / expansion / rollout / backpropagation pass."""
        game, cfg, rng, actions = self.game, self.cfg, self.rng, self.actions
        s = root.state.copy()
        if s.outcome != RUNNING:
            raise ValueError("search root is terminal")
        node = root
        path = []
        while True:
            a = select_action(node, cfg)
            if node is root and self.trace is not None:
                self.trace.append(a)
            path.append((node, a))
            game.step(s, actions[a], rng)
            if s.outcome != RUNNING:
                break
            child = node.children[a]
            if child is None:
                node.children[a] = SearchNode(cfg.variant, len(actions))
                self._rollout(s)
                break
            node = child
        v = add_noise(terminal_value(s, cfg.win_bonus, cfg.loss_penalty), cfg.sigma, self.noise_rng)
        if self.reward_map is not None:
            v = self.reward_map(v)
        for node, a in path:
            node.update(a, v)
        return v

    def _rollout(self, s: GameState) -> None:
        game, rng, actions = self.game, self.rng, self.actions
        k = len(actions)
        for _ in range(self.cfg.rollout_depth):
            if s.outcome != RUNNING:
                return
            game.step(s, actions[rng.randrange(k)], rng)

    def search(self, state: GameState, budget: int | None = None) -> tuple[int, SearchNode]:
        """Fresh tree from ``state``; returns the recommended action index and the root."""
        root = self.new_root(state)
        for _ in range(budget or self.cfg.budget):
            self.run_iteration(root)
        return recommend(root), root


@dataclass
class EpisodeResult:
    win: bool
    score: float
    ticks: int
    moves: int
    iterations: int
    outcome: str

    @property
    def iterations_per_move(self) -> float:
        return self.iterations / self.moves if self.moves else 0.0


def _seeds(seed: int) -> list[int]:
    return [int(x) for x in np.random.SeedSequence(seed).generate_state(3)]


def play_episode(game: GridGame, cfg: SearchConfig, env_seed: int | None = None,
                 max_moves: int | None = None, trajectory: list | None = None) -> EpisodeResult:
    """Play one game, searching afresh before every move.

    The real environment, the simulations inside the search and the
    observation noise draw from three independent RNG streams derived from
    ``cfg.seed`` (and ``env_seed`` for the real environment).
    """
    env_s, search_s, noise_s = _seeds(cfg.seed)
    env_rng = random.Random(env_s if env_seed is None else _seeds(env_seed)[0])
    searcher = Searcher(game, cfg, random.Random(search_s), random.Random(noise_s))
    state = game.initial_state(random.Random(env_rng.random()))
    moves = iterations = 0
    while state.outcome == RUNNING and (max_moves is None or moves < max_moves):
        a, root = searcher.search(state)
        iterations += cfg.budget
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(json.dumps({
                "event": "move", "tick": state.tick, "iterations": cfg.budget,
                "action": game.actions[a], "root_values": [round(x, 6) for x in root.values()],
                "n_a": root.n_a,
            }))
        state, delta = game.advance(state, game.actions[a], env_rng)
        moves += 1
        if trajectory is not None:
            trajectory.append((state.tick, game.actions[a], delta, state.outcome))
    return EpisodeResult(win=state.outcome == WIN, score=state.score, ticks=state.tick,
                         moves=moves, iterations=iterations, outcome=state.outcome)
