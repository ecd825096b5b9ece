"""Summary statistics over (weighted) sample sequences.

Weighted estimators are self-normalised and use log-sum-exp, so adding a
constant to every log-weight never changes their value.  ``std`` is the
population standard deviation (divisor n).
"""

import math
from typing import Any, NamedTuple

from ._backend import kernels
from .runtime.values import truthy

log_sum_exp = kernels.log_sum_exp


class StatError(ValueError):
    pass


class WeightedSample(NamedTuple):
    result: Any
    log_weight: float


def mean(xs):
    xs = list(xs)
    if not xs:
        raise StatError("mean of an empty sequence")
    return math.fsum(xs) / len(xs)


def variance(xs):
    xs = list(xs)
    m = mean(xs)
    return math.fsum((x - m) ** 2 for x in xs) / len(xs)


def std(xs):
    return math.sqrt(variance(xs))


def normalized_weights(log_weights):
    """Normalised weights ``exp(lw - logsumexp(lw))``."""
    log_weights = list(log_weights)
    if not log_weights:
        raise StatError("no weights")
    total = log_sum_exp(log_weights)
    if total == -math.inf:
        raise StatError("all log-weights are -inf")
    return [math.exp(lw - total) for lw in log_weights]


def _as_pairs(samples):
    out = []
    for s in samples:
        if isinstance(s, tuple) and len(s) == 2 and not hasattr(s, "mem"):
            out.append((s[0], s[1]))
        else:
            out.append((s.result, s.log_weight))
    return out


def weighted_mean(samples, f=lambda r: r):
    """Self-normalised estimate of E[f(result)].  ``samples`` may be
    :class:`WeightedSample` pairs or inference states."""
    pairs = _as_pairs(samples)
    ws = normalized_weights(lw for _, lw in pairs)
    return math.fsum(w * f(r) for w, (r, _) in zip(ws, pairs) if w > 0.0)


def empirical_probability(samples, predicate):
    """Weighted fraction of samples whose result satisfies ``predicate``."""
    return weighted_mean(samples, lambda r: 1.0 if truthy(predicate(r)) else 0.0)


def ess(log_weights):
    """Effective sample size ``(sum w)^2 / sum w^2``."""
    ws = normalized_weights(log_weights)
    return 1.0 / math.fsum(w * w for w in ws)


def histogram(xs, bins):
    """Equal-width bins spanning [min, max]; returns ``[(center, count)]``."""
    if bins < 1:
        raise StatError("bins must be at least 1")
    xs = list(xs)
    if not xs:
        return []
    lo, hi = min(xs), max(xs)
    if hi == lo:
        width = 1.0
        lo -= 0.5 * bins * width
        hi = lo + bins * width
    width = (hi - lo) / bins
    counts = [0] * bins
    for x in xs:
        i = int((x - lo) / width)
        counts[min(max(i, 0), bins - 1)] += 1
    return [(lo + (i + 0.5) * width, c) for i, c in enumerate(counts)]
