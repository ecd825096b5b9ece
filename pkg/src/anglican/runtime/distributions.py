"""Distributions: ``sample(rng)`` draws a value, ``observe(value)`` returns
its log probability (log density for continuous kinds, log mass for
discrete ones; ``-inf`` outside the support).

``gamma`` is parameterised by shape and *rate*.
"""

import math
from dataclasses import dataclass

from .values import equals, pr_str

NEG_INF = -math.inf
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class DistributionError(ValueError):
    pass


def _check(ok, kind, param, value, requirement):
    if not ok:
        raise DistributionError(f"{kind}: parameter {param}={pr_str(value)} must be {requirement}")


def _real(x):
    return (x.__class__ is float or x.__class__ is int) and x.__class__ is not bool


def _log(p):
    return math.log(p) if p > 0.0 else NEG_INF


class Distribution:
    """Base class.  Discrete kinds with a finite support also implement
    ``support()``."""

    kind = "distribution"
    discrete = False

    def sample(self, rng):
        raise NotImplementedError

    def observe(self, value):
        raise NotImplementedError

    def to_json(self):
        return pr_str(self)


@dataclass(frozen=True, repr=False)
class Normal(Distribution):
    mean: float
    sd: float
    kind = "normal"

    def __post_init__(self):
        _check(_real(self.mean) and math.isfinite(self.mean), "normal", "mean", self.mean, "a finite real")
        _check(_real(self.sd) and self.sd > 0 and math.isfinite(self.sd), "normal", "sd", self.sd, "> 0")

    def sample(self, rng):
        return self.mean + self.sd * rng.normal()

    def observe(self, value):
        if not _real(value):
            return NEG_INF
        z = (value - self.mean) / self.sd
        return -0.5 * z * z - math.log(self.sd) - _HALF_LOG_2PI

    def __repr__(self):
        return f"(normal {pr_str(self.mean)} {pr_str(self.sd)})"


@dataclass(frozen=True, repr=False)
class Gamma(Distribution):
    shape: float
    rate: float
    kind = "gamma"

    def __post_init__(self):
        _check(_real(self.shape) and self.shape > 0, "gamma", "shape", self.shape, "> 0")
        _check(_real(self.rate) and self.rate > 0, "gamma", "rate", self.rate, "> 0")

    def sample(self, rng):
        return rng.gamma(self.shape) / self.rate

    def observe(self, value):
        if not _real(value) or value <= 0:
            return NEG_INF
        a, b = self.shape, self.rate
        return a * math.log(b) - math.lgamma(a) + (a - 1.0) * math.log(value) - b * value

    def __repr__(self):
        return f"(gamma {pr_str(self.shape)} {pr_str(self.rate)})"


@dataclass(frozen=True, repr=False)
class Beta(Distribution):
    a: float
    b: float
    kind = "beta"

    def __post_init__(self):
        _check(_real(self.a) and self.a > 0, "beta", "a", self.a, "> 0")
        _check(_real(self.b) and self.b > 0, "beta", "b", self.b, "> 0")

    def sample(self, rng):
        return rng.beta(self.a, self.b)

    def observe(self, value):
        if not _real(value) or not 0.0 < value < 1.0:
            return NEG_INF
        a, b = self.a, self.b
        return ((a - 1.0) * math.log(value) + (b - 1.0) * math.log1p(-value)
                + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))

    def __repr__(self):
        return f"(beta {pr_str(self.a)} {pr_str(self.b)})"


@dataclass(frozen=True, repr=False)
class Flip(Distribution):
    """Booleans; true with probability p."""
    p: float
    kind = "flip"
    discrete = True

    def __post_init__(self):
        _check(_real(self.p) and 0 <= self.p <= 1, "flip", "p", self.p, "in [0, 1]")

    def sample(self, rng):
        return rng.random() < self.p

    def observe(self, value):
        if value is True:
            return _log(self.p)
        if value is False:
            return _log(1.0 - self.p)
        return NEG_INF

    def support(self):
        return (False, True)

    def __repr__(self):
        return f"(flip {pr_str(self.p)})"


@dataclass(frozen=True, repr=False)
class Bernoulli(Distribution):
    """0/1 valued; 1 with probability p."""
    p: float
    kind = "bernoulli"
    discrete = True

    def __post_init__(self):
        _check(_real(self.p) and 0 <= self.p <= 1, "bernoulli", "p", self.p, "in [0, 1]")

    def sample(self, rng):
        return 1 if rng.random() < self.p else 0

    def observe(self, value):
        if value.__class__ is int:
            if value == 1:
                return _log(self.p)
            if value == 0:
                return _log(1.0 - self.p)
        return NEG_INF

    def support(self):
        return (0, 1)

    def __repr__(self):
        return f"(bernoulli {pr_str(self.p)})"


def _normalise(kind, weights):
    for i, w in enumerate(weights):
        _check(_real(w) and w >= 0 and math.isfinite(w), kind, f"weight[{i}]", w, ">= 0 and finite")
    total = float(sum(weights))
    _check(total > 0, kind, "weights", tuple(weights), "of positive sum")
    return tuple(w / total for w in weights)


def _pick(probs, u):
    cumulative = 0.0
    last = len(probs) - 1
    for i, p in enumerate(probs):
        cumulative += p
        if u < cumulative and p > 0.0:
            return i
    while probs[last] == 0.0:
        last -= 1
    return last


@dataclass(frozen=True, repr=False)
class Categorical(Distribution):
    """Arbitrary values with normalised probabilities."""
    values: tuple
    probs: tuple
    kind = "categorical"
    discrete = True

    def sample(self, rng):
        return self.values[_pick(self.probs, rng.random())]

    def observe(self, value):
        total = 0.0
        for v, p in zip(self.values, self.probs):
            if equals(v, value):
                total += p
        return _log(total)

    def support(self):
        out = []
        for v in self.values:
            if not any(equals(v, u) for u in out):
                out.append(v)
        return tuple(out)

    def __repr__(self):
        pairs = " ".join(f"[{pr_str(v)} {pr_str(p)}]" for v, p in zip(self.values, self.probs))
        return f"(categorical [{pairs}])"


def categorical(*args):
    """``(categorical [[v w] ...])``, ``(categorical [v w] [v w] ...)`` or
    ``(categorical {v w ...})``."""
    if len(args) == 1:
        arg = args[0]
        pairs = list(arg.items()) if isinstance(arg, dict) else list(arg)
    else:
        pairs = list(args)
    _check(len(pairs) > 0, "categorical", "pairs", tuple(pairs), "non-empty")
    for pair in pairs:
        _check(isinstance(pair, tuple) and len(pair) == 2, "categorical", "pair", pair, "a [value weight] pair")
    values = tuple(p[0] for p in pairs)
    return Categorical(values, _normalise("categorical", [p[1] for p in pairs]))


@dataclass(frozen=True, repr=False)
class Discrete(Distribution):
    """Integers 0..n-1 with probabilities proportional to the weights."""
    probs: tuple
    kind = "discrete"
    discrete = True

    def sample(self, rng):
        return _pick(self.probs, rng.random())

    def observe(self, value):
        if value.__class__ is int and 0 <= value < len(self.probs):
            return _log(self.probs[value])
        return NEG_INF

    def support(self):
        return tuple(range(len(self.probs)))

    def __repr__(self):
        return f"(discrete [{' '.join(pr_str(p) for p in self.probs)}])"


def discrete(weights):
    weights = tuple(weights)
    _check(len(weights) > 0, "discrete", "weights", weights, "non-empty")
    return Discrete(_normalise("discrete", weights))


@dataclass(frozen=True, repr=False)
class UniformDiscrete(Distribution):
    """Integers lo <= k < hi."""
    lo: int
    hi: int
    kind = "uniform-discrete"
    discrete = True

    def __post_init__(self):
        _check(self.lo.__class__ is int, "uniform-discrete", "lo", self.lo, "an integer")
        _check(self.hi.__class__ is int and self.hi > self.lo, "uniform-discrete", "hi", self.hi,
               f"an integer > lo={self.lo}")

    def sample(self, rng):
        return self.lo + rng.randint(self.hi - self.lo)

    def observe(self, value):
        if value.__class__ is int and self.lo <= value < self.hi:
            return -math.log(self.hi - self.lo)
        return NEG_INF

    def support(self):
        return tuple(range(self.lo, self.hi))

    def __repr__(self):
        return f"(uniform-discrete {self.lo} {self.hi})"


@dataclass(frozen=True, repr=False)
class UniformContinuous(Distribution):
    """Reals lo <= x < hi."""
    lo: float
    hi: float
    kind = "uniform-continuous"

    def __post_init__(self):
        _check(_real(self.lo) and math.isfinite(self.lo), "uniform-continuous", "lo", self.lo, "a finite real")
        _check(_real(self.hi) and self.hi > self.lo and math.isfinite(self.hi), "uniform-continuous", "hi",
               self.hi, f"a finite real > lo={pr_str(self.lo)}")

    def sample(self, rng):
        return self.lo + (self.hi - self.lo) * rng.random()

    def observe(self, value):
        if _real(value) and self.lo <= value < self.hi:
            return -math.log(self.hi - self.lo)
        return NEG_INF

    def __repr__(self):
        return f"(uniform-continuous {pr_str(self.lo)} {pr_str(self.hi)})"


# Constructors under the names query code uses.
CONSTRUCTORS = {
    "normal": Normal,
    "gamma": Gamma,
    "beta": Beta,
    "flip": Flip,
    "bernoulli": Bernoulli,
    "categorical": categorical,
    "discrete": discrete,
    "uniform-discrete": UniformDiscrete,
    "uniform-continuous": UniformContinuous,
}


def make_distribution(kind, *params):
    try:
        ctor = CONSTRUCTORS[kind]
    except KeyError:
        raise DistributionError(f"unknown distribution kind: {kind}") from None
    return ctor(*params)


def sample_star(dist, rng):
    return dist.sample(rng)


def observe_star(dist, value):
    if not isinstance(dist, Distribution):
        raise TypeError(f"observe* expects a distribution, got {pr_str(dist)}")
    return dist.observe(value)
