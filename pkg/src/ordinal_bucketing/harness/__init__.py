from .config import ConfigError, ExperimentPlan, load_plan, parse_plan
from .runner import RunSummary, recompute_aggregates, run_gameplay, run_plan, run_quantile_sweep

__all__ = ["ConfigError", "ExperimentPlan", "RunSummary", "load_plan", "parse_plan",
           "recompute_aggregates", "run_gameplay", "run_plan", "run_quantile_sweep"]
