"""Seedable, splittable random stream.

The bit generator is xoshiro256** (256-bit state) from the kernel
backend; both backends produce the same stream for the same seed.  All
variates are derived here in Python from ``random()`` so they are
identical across backends too.
"""

import math

from .._backend import kernels

_TWO_PI = 2.0 * math.pi


class Rng:
    __slots__ = ("_gen", "_spare")

    def __init__(self, seed=0, _gen=None):
        self._gen = kernels.Xoshiro256(seed) if _gen is None else _gen
        self._spare = None

    def random(self):
        """Uniform draw in [0, 1)."""
        return self._gen.random()

    def randint(self, n):
        """Uniform integer in [0, n)."""
        return int(self._gen.random() * n)

    def normal(self):
        """Standard normal draw (Box-Muller, pairs cached)."""
        spare = self._spare
        if spare is not None:
            self._spare = None
            return spare
        rnd = self._gen.random
        r = math.sqrt(-2.0 * math.log(1.0 - rnd()))
        theta = _TWO_PI * rnd()
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def gamma(self, shape):
        """Gamma(shape, 1) draw (Marsaglia-Tsang)."""
        if shape < 1.0:
            u = 1.0 - self._gen.random()
            return self.gamma(shape + 1.0) * u ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = 1.0 - self._gen.random()
            if u < 1.0 - 0.0331 * x * x * x * x:
                return d * v
            if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def beta(self, a, b):
        x = self.gamma(a)
        y = self.gamma(b)
        return x / (x + y)

    def split(self):
        """Independent child stream; advances this stream by one draw."""
        return Rng(_gen=self._gen.split())

    @property
    def state(self):
        return self._gen.state
