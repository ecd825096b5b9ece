"""Pure-Python hot kernels.

``_ckernels.pyx`` implements the same functions with identical results;
``_backend`` picks one at import time.  Anything changed here must be
changed there too (``tests/test_kernels.py`` checks parity).
"""

import math
from types import FunctionType

from .checkpoints import ResultCP

NAME = "python"

_M64 = 0xFFFFFFFFFFFFFFFF
_TWO_M53 = 2.0 ** -53


def splitmix64(x):
    """Return ``(output, next_state)`` of one SplitMix64 step."""
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31), x


class Xoshiro256:
    """xoshiro256** generator, seeded through SplitMix64."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed=0):
        x = seed & _M64
        words = []
        for _ in range(4):
            z, x = splitmix64(x)
            words.append(z)
        if not any(words):
            words[0] = 1
        self.s0, self.s1, self.s2, self.s3 = words

    @property
    def state(self):
        return (self.s0, self.s1, self.s2, self.s3)

    def next_u64(self):
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        r = (s1 * 5) & _M64
        r = (((r << 7) | (r >> 57)) & _M64) * 9 & _M64
        t = (s1 << 17) & _M64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _M64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return r

    def random(self):
        return (self.next_u64() >> 11) * _TWO_M53

    def split(self):
        return Xoshiro256(self.next_u64())


def trampoline(step, handle):
    """Force thunks until a checkpoint needs the handler.

    ``handle(cp)`` returns the next step, or ``None`` to suspend, in which
    case the checkpoint itself is returned.  A ``ResultCP`` always ends
    the loop.
    """
    while True:
        while step.__class__ is FunctionType:
            step = step()
        if step.__class__ is ResultCP:
            return step
        nxt = handle(step)
        if nxt is None:
            return step
        step = nxt


def count_steps(step, handle):
    """Like :func:`trampoline` but also returns the number of thunks forced."""
    n = 0
    while True:
        while step.__class__ is FunctionType:
            step = step()
            n += 1
        if step.__class__ is ResultCP:
            return step, n
        nxt = handle(step)
        if nxt is None:
            return step, n
        step = nxt


class AddressCursor:
    """Assigns ``(identifier, index)`` addresses to checkpoint occurrences,
    padding an identifier's count to a multiple of ``padding`` whenever its
    run of consecutive occurrences was interrupted."""

    __slots__ = ("counters", "last_id", "padding")

    def __init__(self, padding=16, counters=None, last_id=None):
        if padding < 1:
            raise ValueError("padding must be a positive integer")
        self.padding = padding
        self.counters = {} if counters is None else dict(counters)
        self.last_id = last_id

    def next(self, ident):
        count = self.counters.get(ident, 0)
        if ident != self.last_id:
            pad = self.padding
            count = -(-count // pad) * pad
        self.counters[ident] = count + 1
        self.last_id = ident
        return (ident, count)

    def copy(self):
        return AddressCursor(self.padding, self.counters, self.last_id)


def log_sum_exp(xs):
    xs = list(xs)
    m = -math.inf
    for x in xs:
        if x > m:
            m = x
    if m == -math.inf or m == math.inf:
        return m
    total = 0.0
    for x in xs:
        total += math.exp(x - m)
    return m + math.log(total)


def systematic_resample(weights, u):
    """Indices drawn by systematic resampling.  ``weights`` are normalised,
    ``u`` is a single uniform draw in [0, 1)."""
    n = len(weights)
    out = []
    cumulative = 0.0
    j = 0
    last = n - 1
    while last > 0 and not weights[last] > 0.0:
        last -= 1
    for i in range(n):
        target = (i + u) / n
        while j < last and cumulative + weights[j] <= target:
            cumulative += weights[j]
            j += 1
        out.append(j)
    return out
