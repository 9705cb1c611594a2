"""
How the quantile error shrinks with the stream length
=====================================================

A small version of the quantile-error sweep: mean E for the three policies
at growing stream lengths, averaged over a handful of seeds.  The full
experiments live in ``configs/`` and run through the command line tool::

    ordinal-bucketing quantile-sweep --config configs/fig7.json
"""
from ordinal_bucketing.harness import parse_plan, run_plan

plan = parse_plan({
    "family": "QuantileError",
    "repetitions": 10,
    "grid": [
        {"policy": "first_n", "n": 5, "t": [100, 1000, 10000]},
        {"policy": "k_log", "k": [1, 2, 5], "t": [100, 1000, 10000]},
        {"policy": "k_log_first_n", "k": 2, "n": 5, "t": [100, 1000, 10000]},
    ],
})
summary = run_plan(plan)

print(f"{'policy':<15}{'k':>4}{'n':>4}{'t':>8}{'mean E':>10}")
for row in summary.aggregates:
    k = "" if row["k"] is None else row["k"]
    n = "" if row["n"] is None else row["n"]
    print(f"{row['policy']:<15}{k:>4}{n:>4}{row['t']:>8}{row['mean_E']:>10.4f}")

# First-n keeps a flat error; the log-growing policies keep improving
