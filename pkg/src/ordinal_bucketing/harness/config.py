"""Experiment plans: loading, validation and grid expansion."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..distributions import KINDS
from ..environments import GAMES, EnvSpec
from ..search import VARIANTS, SearchConfig

FAMILIES = ("QuantileError", "GamePlay")

QUANTILE_AXES = ("policy", "k", "n", "m", "t", "distribution")
GAMEPLAY_AXES = ("variant", "game", "sigma", "budget")

POLICY_PARAMS = {"first_n": ("n",), "k_log": ("k", "m"), "k_log_first_n": ("k", "n", "m")}

TOP_KEYS = {"family", "repetitions", "base_seed", "output", "grid", "search", "env"}
SEARCH_KEYS = {"C", "rollout_depth", "win_bonus", "loss_penalty"}
ENV_KEYS = set(EnvSpec.__dataclass_fields__) - {"game", "seed"}


class ConfigError(ValueError):
    """Invalid experiment plan; the message names the offending key."""


@dataclass
class ExperimentPlan:
    family: str
    grid: list[dict[str, list]]
    repetitions: int = 1
    base_seed: int = 0
    output: str | None = None
    search: dict[str, Any] = field(default_factory=dict)
    env: dict[str, dict[str, Any]] = field(default_factory=dict)

    @property
    def axes(self) -> tuple[str, ...]:
        return QUANTILE_AXES if self.family == "QuantileError" else GAMEPLAY_AXES

    def points(self) -> list[dict[str, Any]]:
        """All grid points, block by block, in declared axis order."""
        out = []
        for block in self.grid:
            keys = [a for a in self.axes if a in block]
            for combo in itertools.product(*(block[k] for k in keys)):
                point = {a: None for a in self.axes}
                point.update(zip(keys, combo))
                out.append(point)
        return out

    def run_seed(self, repetition: int) -> int:
        return self.base_seed + repetition

    def env_spec(self, game: str, seed: int) -> EnvSpec:
        params = dict(self.env.get("default", {}))
        params.update(self.env.get(game, {}))
        return EnvSpec(game=game, seed=seed, **params)

    def search_config(self, point: dict, seed: int) -> SearchConfig:
        return SearchConfig(variant=point["variant"], sigma=float(point["sigma"]),
                            budget=int(point["budget"]), seed=seed, **self.search)


def load_plan(path, seed: int | None = None, output: str | None = None) -> ExperimentPlan:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    plan = parse_plan(raw)
    if seed is not None:
        plan.base_seed = seed
    if output is not None:
        plan.output = output
    return plan


def parse_plan(raw: dict) -> ExperimentPlan:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s): {sorted(unknown)}")
    family = raw.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"family: expected one of {FAMILIES}, got {family!r}")
    reps = raw.get("repetitions", 1)
    if not isinstance(reps, int) or reps < 1:
        raise ConfigError(f"repetitions: must be an integer >= 1, got {reps!r}")
    base_seed = raw.get("base_seed", 0)
    if not isinstance(base_seed, int):
        raise ConfigError(f"base_seed: must be an integer, got {base_seed!r}")
    grid = raw.get("grid")
    if isinstance(grid, dict):
        grid = [grid]
    if not grid or not isinstance(grid, list):
        raise ConfigError("grid: must be a nonempty object or list of objects")
    axes = QUANTILE_AXES if family == "QuantileError" else GAMEPLAY_AXES
    blocks = []
    for i, block in enumerate(grid):
        where = f"grid[{i}]"
        if not isinstance(block, dict):
            raise ConfigError(f"{where}: must be an object")
        bad = set(block) - set(axes)
        if bad:
            raise ConfigError(f"{where}: unknown key(s) {sorted(bad)}")
        norm = {}
        for key, values in block.items():
            if not isinstance(values, list):
                values = [values]
            if not values:
                raise ConfigError(f"{where}.{key}: empty value list")
            norm[key] = values
        blocks.append(norm)
    search = raw.get("search", {})
    env = raw.get("env", {})
    if family == "QuantileError":
        if search or env:
            raise ConfigError("search/env: only valid for the GamePlay family")
        for i, block in enumerate(blocks):
            _check_quantile_block(block, f"grid[{i}]")
    else:
        _check_search(search)
        _check_env(env)
        for i, block in enumerate(blocks):
            _check_gameplay_block(block, f"grid[{i}]")
    plan = ExperimentPlan(family=family, grid=blocks, repetitions=reps, base_seed=base_seed,
                          output=raw.get("output"), search=search, env=env)
    if family == "GamePlay":
        # surface EnvSpec / SearchConfig range errors before any run starts
        for point in plan.points():
            try:
                plan.env_spec(point["game"], 0)
                plan.search_config(point, 0)
            except ValueError as exc:
                raise ConfigError(f"grid point {point}: {exc}") from exc
    return plan


def _check_quantile_block(block: dict, where: str) -> None:
    for key in ("policy", "t"):
        if key not in block:
            raise ConfigError(f"{where}.{key}: required")
    block.setdefault("distribution", ["gaussian"])
    for policy in block["policy"]:
        if policy not in POLICY_PARAMS:
            raise ConfigError(f"{where}.policy: unknown policy {policy!r}")
        needed = POLICY_PARAMS[policy]
        for p in ("k", "n"):
            if p in needed and p not in block:
                raise ConfigError(f"{where}.{p}: required by policy {policy!r}")
        for p in ("k", "n", "m"):
            if p not in needed and p in block:
                raise ConfigError(f"{where}.{p}: not a parameter of policy {policy!r}")
        if "m" in needed:
            block.setdefault("m", [3])
    for k in block.get("k", []):
        if not isinstance(k, (int, float)) or k <= 0:
            raise ConfigError(f"{where}.k: must be positive, got {k!r}")
    for n in block.get("n", []):
        if not isinstance(n, int) or n < 1:
            raise ConfigError(f"{where}.n: must be an integer >= 1, got {n!r}")
    for m in block.get("m", []):
        if not isinstance(m, int) or m < 1 or m % 2 == 0:
            raise ConfigError(f"{where}.m: must be a positive odd integer, got {m!r}")
    for t in block["t"]:
        if not isinstance(t, int) or t < 2:
            raise ConfigError(f"{where}.t: need at least 2 samples for q >= 2 quantiles, got {t!r}")
    # n fixed bounds plus TOP give up to n + 1 buckets; q must not exceed t
    for n in block.get("n", []):
        short = [t for t in block["t"] if t <= n]
        if short:
            raise ConfigError(f"{where}.t: up to q = n + 1 = {n + 1} buckets but only t = {short[0]} samples")
    for d in block["distribution"]:
        if d not in KINDS:
            raise ConfigError(f"{where}.distribution: unknown distribution {d!r}")


def _check_gameplay_block(block: dict, where: str) -> None:
    for key in GAMEPLAY_AXES:
        if key not in block:
            raise ConfigError(f"{where}.{key}: required")
    for v in block["variant"]:
        if v not in VARIANTS:
            raise ConfigError(f"{where}.variant: unknown variant {v!r}")
    for g in block["game"]:
        if g not in GAMES:
            raise ConfigError(f"{where}.game: unknown game {g!r}")
    for s in block["sigma"]:
        if not isinstance(s, (int, float)) or s < 0:
            raise ConfigError(f"{where}.sigma: must be >= 0, got {s!r}")
    for b in block["budget"]:
        if not isinstance(b, int) or b < 1:
            raise ConfigError(f"{where}.budget: must be an integer >= 1, got {b!r}")


def _check_search(search) -> None:
    if not isinstance(search, dict):
        raise ConfigError("search: must be an object")
    bad = set(search) - SEARCH_KEYS
    if bad:
        raise ConfigError(f"search: unknown key(s) {sorted(bad)}")


def _check_env(env) -> None:
    if not isinstance(env, dict):
        raise ConfigError("env: must be an object")
    for name, params in env.items():
        if name != "default" and name not in GAMES:
            raise ConfigError(f"env.{name}: unknown game")
        if not isinstance(params, dict):
            raise ConfigError(f"env.{name}: must be an object")
        bad = set(params) - ENV_KEYS
        if bad:
            raise ConfigError(f"env.{name}: unknown key(s) {sorted(bad)}")
