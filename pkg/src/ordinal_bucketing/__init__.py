"""Ordinal bucketing sketches and ordinal Monte Carlo tree search."""
from .bucketing import TOP, Bucket, Bucketing, FirstN, KLogGrowing, KLogGrowingFirstN, make_policy, space_bound
from .distributions import SourceSpec, add_noise, sample, sample_stream
from .environments import EnvSpec, GameState, make_game, observe_score, terminal_value
from .quantile_eval import ErrorReport, bucketing_error, rank, true_quantiles
from .search import (
    SearchConfig, SearchNode, Searcher, dominance, dominance_from_pmfs, play_episode, prob_beats, recommend,
    select_action,
)

__version__ = "0.1.0"

__all__ = [
    "TOP", "Bucket", "Bucketing", "EnvSpec", "ErrorReport", "FirstN", "GameState", "KLogGrowing",
    "KLogGrowingFirstN", "SearchConfig", "SearchNode", "Searcher", "SourceSpec", "add_noise",
    "bucketing_error", "dominance", "dominance_from_pmfs", "make_game", "make_policy", "observe_score",
    "play_episode", "prob_beats", "rank", "recommend", "sample", "sample_stream", "select_action",
    "space_bound", "terminal_value", "true_quantiles",
]
