"""Small grid-world forward models for the search experiments.

Three games, each a desk-scale analogue of a different reward structure:

``KeyDoor``
    Pick up the key (+1), then walk into the door to win.  Enemies wander
    the room; touching one loses, swinging the sword at an adjacent enemy
    kills it (+2).  Running out of ticks loses.
``MoleField``
    Items spawn at random and give +1 when collected.  A wandering cat is the
    only hazard; surviving until the tick limit wins.
``Hunter``
    Enemies wander in; touching one without a power-up loses, touching one
    while powered kills it (+1).  The ``boss_kills``-th kill triggers a
    one-off +1000 bonus.  Surviving until the tick limit wins.

Positions are flat cell indices ``y * width + x`` on a grid whose border
cells are walls.  Moving into a wall is a legal no-op, so every game keeps a
fixed action set.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from typing import Sequence

from .distributions import add_noise

RUNNING, WIN, LOSS = "running", "win", "loss"

UP, DOWN, LEFT, RIGHT, USE, IDLE = range(6)
ACTION_NAMES = ("up", "down", "left", "right", "use", "idle")


class TerminalStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnvSpec:
    game: str = "KeyDoor"
    width: int = 9
    height: int = 9
    tick_limit: int = 2000
    n_enemies: int = 2
    enemy_move_prob: float = 0.5
    spawn_rate: float = 0.1
    max_items: int = 3
    power_ticks: int = 10
    boss_kills: int = 3
    layout: dict = field(default_factory=dict, compare=False, hash=False)
    seed: int = 0

    def __post_init__(self):
        if self.game not in GAMES:
            raise ValueError(f"unknown game {self.game!r}; expected one of {sorted(GAMES)}")
        if self.width < 3 or self.height < 3:
            raise ValueError("grid must be at least 3x3 including walls")
        if self.tick_limit < 1:
            raise ValueError("tick_limit must be positive")
        for name in ("enemy_move_prob", "spawn_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.n_enemies < 0 or self.max_items < 0 or self.power_ticks < 0 or self.boss_kills < 1:
            raise ValueError("entity counts must be nonnegative (boss_kills >= 1)")


class GameState:
    """Mutable game state; :meth:`copy` gives an independent value."""

    __slots__ = ("width", "height", "player", "enemies", "items", "key", "door", "has_key",
                 "power", "kills", "score", "tick", "outcome")

    def __init__(self, width, height, player, enemies=(), items=(), key=None, door=None,
                 has_key=False, power=0, kills=0, score=0, tick=0, outcome=RUNNING):
        self.width = width
        self.height = height
        self.player = player
        self.enemies = list(enemies)
        self.items = list(items)
        self.key = key
        self.door = door
        self.has_key = has_key
        self.power = power
        self.kills = kills
        self.score = score
        self.tick = tick
        self.outcome = outcome

    def copy(self) -> "GameState":
        s = GameState.__new__(GameState)
        s.width = self.width
        s.height = self.height
        s.player = self.player
        s.enemies = self.enemies[:]
        s.items = self.items[:]
        s.key = self.key
        s.door = self.door
        s.has_key = self.has_key
        s.power = self.power
        s.kills = self.kills
        s.score = self.score
        s.tick = self.tick
        s.outcome = self.outcome
        return s

    @property
    def terminal(self) -> bool:
        return self.outcome != RUNNING

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, k) if not isinstance(getattr(self, k), list) else tuple(getattr(self, k))
                     for k in self.__slots__)

    def __eq__(self, other):
        return isinstance(other, GameState) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def xy(self, cell: int) -> tuple[int, int]:
        return cell % self.width, cell // self.width

    def __repr__(self):
        return (f"GameState(player={self.xy(self.player)}, score={self.score}, tick={self.tick}, "
                f"outcome={self.outcome})")


class GridGame:
    """Shared movement and bookkeeping for the grid games."""

    actions = (UP, DOWN, LEFT, RIGHT, IDLE)

    def __init__(self, spec: EnvSpec):
        self.spec = spec
        w, h = spec.width, spec.height
        self.width, self.height = w, h
        self.tick_limit = spec.tick_limit
        self._offsets = (-w, w, -1, 1)
        self.free = [y * w + x for y in range(1, h - 1) for x in range(1, w - 1)]
        self._free_set = frozenset(self.free)
        # neighbour table: cell -> destination after each move (walls block)
        self._moves = {c: tuple(c + d if c + d in self._free_set else c for d in self._offsets)
                       for c in self.free}
        self.actions = list(self.actions)

    def cell(self, x: int, y: int) -> int:
        return y * self.width + x

    def legal_actions(self, s: GameState) -> list[int]:
        if s.outcome != RUNNING:
            raise TerminalStateError("no actions in a terminal state")
        return self.actions

    def advance(self, s: GameState, a: int, rng: random.Random) -> tuple[GameState, int]:
        """Apply ``a`` to a copy of ``s``; returns the new state and the score delta."""
        if s.outcome != RUNNING:
            raise TerminalStateError("cannot advance a terminal state")
        nxt = s.copy()
        delta = self.step(nxt, a, rng)
        return nxt, delta

    def step(self, s: GameState, a: int, rng: random.Random) -> int:
        """In-place transition used by rollouts; caller guarantees ``s`` is running."""
        raise NotImplementedError

    def initial_state(self, rng: random.Random | None = None) -> GameState:
        raise NotImplementedError

    def _wander(self, s: GameState, rng: random.Random, prob: float) -> None:
        moves = self._moves
        enemies = s.enemies
        for i in range(len(enemies)):
            if rng.random() < prob:
                enemies[i] = moves[enemies[i]][rng.randrange(4)]

    def _tick(self, s: GameState, timeout_outcome: str) -> None:
        s.tick += 1
        if s.outcome == RUNNING and s.tick >= self.tick_limit:
            s.outcome = timeout_outcome


def _layout_cell(game: GridGame, layout: dict, name: str, default: tuple[int, int]) -> int:
    x, y = layout.get(name, default)
    c = game.cell(x, y)
    if c not in game._free_set:
        raise ValueError(f"{name} position {(x, y)} is not a free cell")
    return c


class KeyDoor(GridGame):
    actions = (UP, DOWN, LEFT, RIGHT, USE, IDLE)

    def initial_state(self, rng=None):
        w, h = self.width, self.height
        lay = self.spec.layout
        player = _layout_cell(self, lay, "player", (1, h - 2))
        key = _layout_cell(self, lay, "key", (w - 2, h - 2))
        door = _layout_cell(self, lay, "door", (w - 2, 1))
        if "enemies" in lay:
            enemies = [_layout_cell(self, {"e": p}, "e", p) for p in lay["enemies"]]
        else:
            rng = rng or random.Random(self.spec.seed)
            taken = {player, key, door}
            near = set(self._moves[player]) | {c for m in self._moves[player] for c in self._moves[m]}
            pool = [c for c in self.free if c not in taken and c not in near]
            enemies = rng.sample(pool, min(self.spec.n_enemies, len(pool)))
        return GameState(w, h, player, enemies=enemies, key=key, door=door)

    def step(self, s, a, rng):
        delta = 0
        if a < USE:
            dest = self._moves[s.player][a]
            if dest == s.door:
                if s.has_key:
                    s.player = dest
                    s.outcome = WIN
            else:
                s.player = dest
                if dest == s.key:
                    s.key = None
                    s.has_key = True
                    delta = 1
        elif a == USE:
            around = self._moves[s.player]
            kept = [e for e in s.enemies if e not in around]
            delta = 2 * (len(s.enemies) - len(kept))
            s.enemies = kept
        if s.outcome == RUNNING:
            if s.player in s.enemies:
                s.outcome = LOSS
            else:
                self._wander(s, rng, self.spec.enemy_move_prob)
                if s.player in s.enemies:
                    s.outcome = LOSS
        s.score += delta
        self._tick(s, LOSS)
        return delta


class MoleField(GridGame):
    def initial_state(self, rng=None):
        w, h = self.width, self.height
        lay = self.spec.layout
        player = _layout_cell(self, lay, "player", (1, 1))
        cat = _layout_cell(self, lay, "cat", (w - 2, h - 2))
        items = [_layout_cell(self, {"i": p}, "i", p) for p in lay.get("items", ())]
        return GameState(w, h, player, enemies=[cat], items=items)

    def step(self, s, a, rng):
        delta = 0
        if a < USE:
            s.player = self._moves[s.player][a]
        if s.player in s.items:
            s.items.remove(s.player)
            delta = 1
        if s.player in s.enemies:
            s.outcome = LOSS
        else:
            self._wander(s, rng, self.spec.enemy_move_prob)
            if s.player in s.enemies:
                s.outcome = LOSS
            elif len(s.items) < self.spec.max_items and rng.random() < self.spec.spawn_rate:
                c = self.free[rng.randrange(len(self.free))]
                if c != s.player and c not in s.items and c not in s.enemies:
                    s.items.append(c)
        s.score += delta
        self._tick(s, WIN)
        return delta


class Hunter(GridGame):
    """Items are power-ups; ``power`` counts remaining powered ticks."""

    def initial_state(self, rng=None):
        w, h = self.width, self.height
        lay = self.spec.layout
        player = _layout_cell(self, lay, "player", (w // 2, h // 2))
        items = [_layout_cell(self, {"i": p}, "i", p)
                 for p in lay.get("items", [(1, 1), (w - 2, h - 2)])]
        if "enemies" in lay:
            enemies = [_layout_cell(self, {"e": p}, "e", p) for p in lay["enemies"]]
        else:
            enemies = [self.cell(1, h - 2), self.cell(w - 2, 1)][: self.spec.n_enemies]
        return GameState(w, h, player, enemies=enemies, items=items)

    def step(self, s, a, rng):
        delta = 0
        if a < USE:
            s.player = self._moves[s.player][a]
        if s.power:
            s.power -= 1
        if s.player in s.items:
            s.items.remove(s.player)
            s.power = self.spec.power_ticks
        delta += self._contact(s)
        if s.outcome == RUNNING:
            self._wander(s, rng, self.spec.enemy_move_prob)
            delta += self._contact(s)
            if s.outcome == RUNNING and len(s.enemies) < self.spec.n_enemies and rng.random() < self.spec.spawn_rate:
                edge = [self.cell(1, 1), self.cell(self.width - 2, 1),
                        self.cell(1, self.height - 2), self.cell(self.width - 2, self.height - 2)]
                c = edge[rng.randrange(4)]
                if c != s.player:
                    s.enemies.append(c)
        s.score += delta
        self._tick(s, WIN)
        return delta

    def _contact(self, s):
        if s.player not in s.enemies:
            return 0
        if not s.power:
            s.outcome = LOSS
            return 0
        hit = s.enemies.count(s.player)
        s.enemies = [e for e in s.enemies if e != s.player]
        before = s.kills
        s.kills += hit
        delta = hit
        if before < self.spec.boss_kills <= s.kills:
            delta += 1000
        return delta


GAMES = {"KeyDoor": KeyDoor, "MoleField": MoleField, "Hunter": Hunter}


def make_game(spec: EnvSpec) -> GridGame:
    return GAMES[spec.game](spec)


def legal_actions(game: GridGame, s: GameState) -> list[int]:
    return game.legal_actions(s)


def advance(game: GridGame, s: GameState, a: int, rng: random.Random) -> tuple[GameState, int]:
    return game.advance(s, a, rng)


def terminal_value(s: GameState, win_bonus: float = 1000.0, loss_penalty: float = 1000.0) -> float:
    """Score with the win bonus / loss penalty folded in."""
    if s.outcome == WIN:
        return s.score + win_bonus
    if s.outcome == LOSS:
        return s.score - loss_penalty
    return s.score


def observe_score(s: GameState, sigma: float, rng, win_bonus: float = 1000.0,
                  loss_penalty: float = 1000.0) -> float:
    """Heuristic value of ``s`` perturbed by N(0, sigma) observation noise."""
    return add_noise(terminal_value(s, win_bonus, loss_penalty), sigma, rng)


def write_trajectory(path, rows: Sequence[tuple]) -> None:
    """Dump ``(tick, action, delta, outcome)`` rows as CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tick", "action", "delta", "outcome"])
        w.writerows(rows)
