"""
Summarizing a stream with ordinal buckets
=========================================

Feed a stream of values into the three bucketing policies and compare the
bucket bounds they settle on with the exact quantiles of the stream.
"""
import math

import numpy as np

from ordinal_bucketing import (
    Bucketing, FirstN, KLogGrowing, KLogGrowingFirstN, SourceSpec, bucketing_error, sample_stream,
    true_quantiles,
)

# 1000 draws from a Gaussian truncated to [0, 5]
stream = sample_stream(SourceSpec("gaussian", seed=1), 1000).tolist()

policies = {
    "First-5": FirstN(5),
    "2-Log-Growing": KLogGrowing(2),
    "2-Log-Growing-First-5": KLogGrowingFirstN(2, 5),
}

for name, policy in policies.items():
    sketch = Bucketing(policy)
    sketch.extend(stream)
    q = len(sketch)
    report = bucketing_error(stream, sketch)
    print(f"{name}: {q} buckets, E = {report.E:.4f}")
    print("  bounds:", np.round(sketch.quantile_estimates(), 3))
    print("  exact :", np.round(true_quantiles(stream, q), 3))
    print("  counts:", sketch.counts())

# the growing policies keep about k*ln(t) finite bounds
print("2*ln(1000) =", round(2 * math.log(1000), 2))

# only comparisons are used: a monotone transform of the stream gives the
# same bucket counts, with transformed bounds
a, b = Bucketing(KLogGrowing(2)), Bucketing(KLogGrowing(2))
a.extend(stream)
b.extend(math.exp(x) for x in stream)
print("same counts after exp():", a.counts() == b.counts())

# the text form can be saved and reloaded
text = a.dumps()
print(text.splitlines()[0])
print("roundtrip ok:", Bucketing.loads(text).dumps() == text)
