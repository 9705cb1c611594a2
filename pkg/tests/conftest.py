import random

from ordinal_bucketing.environments import WIN, GameState


class Bandit:
    """One-step game: pulling arm ``a`` ends the game with a reward drawn from ``arms[a]``.

    Each arm is a list of values sampled uniformly.  The outcome is a win so
    the search stores ``score + win_bonus``; tests pass ``win_bonus=0``.
    """

    def __init__(self, arms):
        self.arms = [list(a) for a in arms]
        self.actions = list(range(len(arms)))

    def initial_state(self, rng=None):
        return GameState(3, 3, 4)

    def step(self, s, a, rng):
        values = self.arms[a]
        s.score = values[rng.randrange(len(values))] if len(values) > 1 else values[0]
        s.outcome = WIN
        s.tick += 1
        return s.score

    def advance(self, s, a, rng):
        nxt = s.copy()
        return nxt, self.step(nxt, a, rng)


def random_bandit(seed, k=3):
    rng = random.Random(seed)
    return Bandit([[rng.randint(-20, 20) for _ in range(rng.randint(1, 5))] for _ in range(k)])



def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module and module.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(module.REPORT, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
