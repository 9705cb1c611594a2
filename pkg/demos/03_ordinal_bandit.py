"""
Comparing actions without averaging rewards
===========================================

Ordinal search rates an action by how often its rewards beat those of its
siblings.  This script shows the pairwise win probability, the dominance
score built from it, and why a monotone rescaling of rewards changes the
mean-based baseline but not the ordinal one.
"""
from ordinal_bucketing import SearchConfig, Searcher, dominance_from_pmfs, prob_beats
from ordinal_bucketing.environments import WIN, GameState
from ordinal_bucketing.search import ExactTallyStats, MeanStats

# ties count half
print(prob_beats([(1, 0.5), (3, 0.5)], [(2, 1.0)]))   # 0.5
print(prob_beats([(5, 1.0)], [(3, 1.0)]))             # 1.0

# dominance of three point masses
pmfs = [[(5, 1)], [(3, 1)], [(1, 1)]]
print([dominance_from_pmfs(pmfs, a) for a in range(3)])  # [1.0, 0.5, 0.0]

# arm 0 pays 0 or 10, arm 1 always pays 6
rewards = [(0, 0), (0, 10), (1, 6), (1, 6)]
for name, f in (("identity", lambda x: x), ("cube", lambda x: x ** 3)):
    mean, tally = MeanStats(2), ExactTallyStats(2)
    for a, v in rewards:
        mean.update(a, f(v))
        tally.update(a, f(v))
    print(f"{name:>8}: means {mean.means()}  dominance {tally.exploitation()}")


class Bandit:
    """One pull and the game is over."""

    def __init__(self, arms):
        self.arms = arms
        self.actions = list(range(len(arms)))

    def initial_state(self, rng=None):
        return GameState(3, 3, 4)

    def step(self, s, a, rng):
        s.score = rng.choice(self.arms[a])
        s.outcome = WIN
        return s.score


game = Bandit([[0, 1, 2], [1, 2, 3], [-1, 0, 1]])
for variant in ("MCTS", "OMCTS-exact", "OMCTS-2Log3"):
    searcher = Searcher(game, SearchConfig(variant=variant, budget=600, win_bonus=0, seed=3))
    best, root = searcher.search(game.initial_state())
    print(f"{variant:<12} picks arm {best}, visits {root.n_a}")

# the ordinal search makes identical decisions on cubed rewards
traces = []
for f in (None, lambda x: x ** 3 + x):
    s = Searcher(game, SearchConfig(variant="OMCTS-exact", budget=300, win_bonus=0, seed=5), reward_map=f)
    s.trace = []
    s.search(game.initial_state())
    traces.append(s.trace)
print("identical selections:", traces[0] == traces[1])
