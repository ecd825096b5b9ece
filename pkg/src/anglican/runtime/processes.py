"""Random processes: ``produce`` gives the distribution of the next value,
``absorb`` returns the process updated with an observed value.  Both are
pure; a process value never changes."""

from dataclasses import dataclass

from .distributions import Bernoulli, DistributionError, _real
from .values import pr_str


class RandomProcess:
    kind = "random-process"

    def produce(self):
        raise NotImplementedError

    def absorb(self, value):
        raise NotImplementedError

    def to_json(self):
        return pr_str(self)


@dataclass(frozen=True, repr=False)
class BetaBernoulli(RandomProcess):
    a: float
    b: float
    kind = "beta-bernoulli"

    def __post_init__(self):
        if not (_real(self.a) and self.a > 0):
            raise DistributionError(f"beta-bernoulli: parameter a={pr_str(self.a)} must be > 0")
        if not (_real(self.b) and self.b > 0):
            raise DistributionError(f"beta-bernoulli: parameter b={pr_str(self.b)} must be > 0")

    def produce(self):
        return Bernoulli(self.a / (self.a + self.b))

    def absorb(self, value):
        if value.__class__ is int and value == 1:
            return BetaBernoulli(self.a + 1, self.b)
        if value.__class__ is int and value == 0:
            return BetaBernoulli(self.a, self.b + 1)
        raise ValueError(f"beta-bernoulli cannot absorb {pr_str(value)}: expected 0 or 1")

    def __repr__(self):
        return f"(beta-bernoulli {pr_str(self.a)} {pr_str(self.b)})"


def produce(process):
    return process.produce()


def absorb(process, value):
    return process.absorb(value)
