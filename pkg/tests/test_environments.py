import random

import pytest
from hypothesis import given, settings, strategies as st

from ordinal_bucketing.distributions import add_noise
from ordinal_bucketing.environments import (
    DOWN, IDLE, LEFT, LOSS, RIGHT, RUNNING, UP, USE, WIN, EnvSpec, TerminalStateError, advance,
    legal_actions, make_game, observe_score, terminal_value, write_trajectory,
)

GAMES = ("KeyDoor", "MoleField", "Hunter")


def key_door(**layout):
    return make_game(EnvSpec("KeyDoor", layout={"enemies": [], **layout}))


def test_key_door_actions_mid_grid():
    game = key_door(player=(4, 4))
    assert len(legal_actions(game, game.initial_state())) == 6


def test_other_games_have_five_actions():
    for name in ("MoleField", "Hunter"):
        game = make_game(EnvSpec(name))
        assert legal_actions(game, game.initial_state()) == [UP, DOWN, LEFT, RIGHT, IDLE]


def test_terminal_state_has_no_actions():
    game = key_door(player=(6, 7), key=(7, 7), door=(7, 6))
    s, _ = advance(game, game.initial_state(), RIGHT, random.Random(0))
    s, _ = advance(game, s, UP, random.Random(0))
    assert s.outcome == WIN
    with pytest.raises(TerminalStateError):
        legal_actions(game, s)
    with pytest.raises(TerminalStateError):
        advance(game, s, IDLE, random.Random(0))


def test_wall_move_is_noop():
    game = key_door(player=(1, 1))
    s0 = game.initial_state()
    s, delta = advance(game, s0, UP, random.Random(0))
    assert s.player == s0.player and delta == 0 and s.tick == 1


def test_key_pickup():
    game = key_door(player=(6, 7))
    s, delta = advance(game, game.initial_state(), RIGHT, random.Random(0))
    assert delta == 1 and s.has_key and s.key is None and s.score == 1


def test_door_without_key_blocks():
    game = key_door(player=(7, 2))
    s, _ = advance(game, game.initial_state(), UP, random.Random(0))
    assert s.outcome == RUNNING and s.player == game.cell(7, 2)


def test_sword_kills_adjacent_enemy():
    game = make_game(EnvSpec("KeyDoor", enemy_move_prob=0.0, layout={"player": (4, 4), "enemies": [(4, 3), (6, 6)]}))
    s, delta = advance(game, game.initial_state(), USE, random.Random(0))
    assert delta == 2 and s.enemies == [game.cell(6, 6)]


def test_enemy_contact_loses():
    game = make_game(EnvSpec("KeyDoor", enemy_move_prob=0.0, layout={"player": (4, 4), "enemies": [(5, 4)]}))
    s, _ = advance(game, game.initial_state(), RIGHT, random.Random(0))
    assert s.outcome == LOSS


def test_key_door_timeout_loses():
    game = make_game(EnvSpec("KeyDoor", tick_limit=5, layout={"enemies": []}))
    s = game.initial_state()
    for _ in range(5):
        s, _ = advance(game, s, IDLE, random.Random(0))
    assert s.tick == 5 and s.outcome == LOSS


def test_key_door_default_limit():
    assert EnvSpec("KeyDoor").tick_limit == 2000


def test_mole_field_idle_without_spawns():
    game = make_game(EnvSpec("MoleField", spawn_rate=0.0, enemy_move_prob=0.0))
    s0 = game.initial_state()
    s, delta = advance(game, s0, IDLE, random.Random(0))
    assert delta == 0 and s.player == s0.player and s.enemies == s0.enemies and s.tick == s0.tick + 1


def test_mole_field_pickup_and_timeout_win():
    game = make_game(EnvSpec("MoleField", spawn_rate=0.0, enemy_move_prob=0.0, tick_limit=2,
                             layout={"items": [(2, 1)]}))
    s, delta = advance(game, game.initial_state(), RIGHT, random.Random(0))
    assert delta == 1 and s.items == []
    s, _ = advance(game, s, IDLE, random.Random(0))
    assert s.outcome == WIN


def test_hunter_power_kill_and_boss_bonus():
    spec = EnvSpec("Hunter", enemy_move_prob=0.0, spawn_rate=0.0, boss_kills=2, n_enemies=2,
                   layout={"player": (2, 1), "items": [(1, 1)], "enemies": [(3, 1), (4, 1)]})
    game = make_game(spec)
    rng = random.Random(0)
    s, d0 = advance(game, game.initial_state(), LEFT, rng)
    assert d0 == 0 and s.power == spec.power_ticks
    deltas = []
    for a in (RIGHT, RIGHT, RIGHT):
        s, d = advance(game, s, a, rng)
        deltas.append(d)
    assert deltas == [0, 1, 1001]
    assert s.score == 1002 and s.outcome == RUNNING


def test_hunter_contact_without_power_loses():
    game = make_game(EnvSpec("Hunter", enemy_move_prob=0.0, spawn_rate=0.0,
                             layout={"player": (2, 1), "items": [], "enemies": [(3, 1)]}))
    s, _ = advance(game, game.initial_state(), RIGHT, random.Random(0))
    assert s.outcome == LOSS


def test_terminal_value_offsets():
    game = key_door(player=(6, 7), key=(7, 7), door=(7, 6))
    s, _ = advance(game, game.initial_state(), RIGHT, random.Random(0))
    s, _ = advance(game, s, UP, random.Random(0))
    assert terminal_value(s) == 1001
    assert observe_score(s, 0.0, random.Random(0)) == 1001
    rng_a, rng_b = random.Random(3), random.Random(3)
    assert observe_score(s, 10.0, rng_a) == add_noise(1001, 10.0, rng_b)


def test_observations_are_per_call():
    game = key_door()
    s = game.initial_state()
    rng = random.Random(0)
    assert observe_score(s, 10.0, rng) != observe_score(s, 10.0, rng)


@pytest.mark.parametrize("kwargs", [dict(width=2), dict(tick_limit=0), dict(spawn_rate=1.5),
                                    dict(game="Zelda"), dict(boss_kills=0)])
def test_env_spec_validation(kwargs):
    with pytest.raises(ValueError):
        EnvSpec(**kwargs)


def test_layout_on_wall_rejected():
    with pytest.raises(ValueError):
        key_door(player=(0, 0)).initial_state()


def test_write_trajectory(tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory(path, [(1, RIGHT, 1, RUNNING), (2, UP, 0, WIN)])
    assert path.read_text().splitlines() == ["tick,action,delta,outcome", "1,3,1,running", "2,0,0,win"]


def rollout(game, seed, actions):
    rng = random.Random(seed)
    s = game.initial_state(random.Random(seed))
    trail = [s]
    deltas = []
    for a in actions:
        if s.outcome != RUNNING:
            break
        before = hash(s)
        nxt, d = advance(game, s, a, rng)
        assert hash(s) == before
        s = nxt
        trail.append(s)
        deltas.append(d)
    return trail, deltas


@given(st.sampled_from(GAMES), st.integers(0, 10_000), st.lists(st.integers(0, 5), max_size=150))
@settings(max_examples=120, deadline=None)
def test_trajectory_properties(name, seed, actions):
    game = make_game(EnvSpec(name, tick_limit=100, spawn_rate=0.3))
    actions = [a if a in game.actions else IDLE for a in actions]
    trail, deltas = rollout(game, seed, actions)
    again, deltas2 = rollout(game, seed, actions)
    assert trail == again and deltas == deltas2
    assert trail[-1].score == sum(deltas)
    assert all(s.tick <= game.tick_limit for s in trail)
    allowed = {"KeyDoor": {0, 1, 2, 4}, "MoleField": {0, 1}, "Hunter": {0, 1, 2, 1001, 1002}}[name]
    assert set(deltas) <= allowed
