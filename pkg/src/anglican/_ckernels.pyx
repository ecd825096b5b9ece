# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same API and results as ``_kernels``."""

from libc.math cimport exp, log, INFINITY
from libc.stdint cimport uint64_t
from types import FunctionType

from .checkpoints import ResultCP

NAME = "cython"

cdef double _TWO_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _rotl(uint64_t x, int k):
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _splitmix_next(uint64_t* x):
    x[0] += <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = x[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def splitmix64(x):
    """Return ``(output, next_state)`` of one SplitMix64 step."""
    cdef uint64_t s = <uint64_t>(x & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t z = _splitmix_next(&s)
    return z, s


cdef class Xoshiro256:
    """xoshiro256** generator, seeded through SplitMix64."""

    cdef uint64_t s0, s1, s2, s3

    def __init__(self, seed=0):
        cdef uint64_t x = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
        self.s0 = _splitmix_next(&x)
        self.s1 = _splitmix_next(&x)
        self.s2 = _splitmix_next(&x)
        self.s3 = _splitmix_next(&x)
        if self.s0 == 0 and self.s1 == 0 and self.s2 == 0 and self.s3 == 0:
            self.s0 = 1

    @property
    def state(self):
        return (self.s0, self.s1, self.s2, self.s3)

    cdef inline uint64_t _next(self):
        cdef uint64_t r = _rotl(self.s1 * 5, 7) * 9
        cdef uint64_t t = self.s1 << 17
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return r

    def next_u64(self):
        return self._next()

    def random(self):
        return (self._next() >> 11) * _TWO_M53

    def split(self):
        return Xoshiro256(self._next())


def trampoline(step, handle):
    """Force thunks until a checkpoint needs the handler.

    ``handle(cp)`` returns the next step, or ``None`` to suspend, in which
    case the checkpoint itself is returned.  A ``ResultCP`` always ends
    the loop.
    """
    cdef object fn_type = FunctionType
    cdef object result_type = ResultCP
    while True:
        while type(step) is fn_type:
            step = step()
        if type(step) is result_type:
            return step
        nxt = handle(step)
        if nxt is None:
            return step
        step = nxt


def count_steps(step, handle):
    """Like :func:`trampoline` but also returns the number of thunks forced."""
    cdef object fn_type = FunctionType
    cdef object result_type = ResultCP
    cdef Py_ssize_t n = 0
    while True:
        while type(step) is fn_type:
            step = step()
            n += 1
        if type(step) is result_type:
            return step, n
        nxt = handle(step)
        if nxt is None:
            return step, n
        step = nxt


cdef class AddressCursor:
    """Assigns ``(identifier, index)`` addresses to checkpoint occurrences,
    padding an identifier's count to a multiple of ``padding`` whenever its
    run of consecutive occurrences was interrupted."""

    cdef public dict counters
    cdef public object last_id
    cdef public long padding

    def __init__(self, padding=16, counters=None, last_id=None):
        if padding < 1:
            raise ValueError("padding must be a positive integer")
        self.padding = padding
        self.counters = {} if counters is None else dict(counters)
        self.last_id = last_id

    def next(self, ident):
        cdef long count = self.counters.get(ident, 0)
        cdef long pad
        if ident != self.last_id:
            pad = self.padding
            count = ((count + pad - 1) // pad) * pad
        self.counters[ident] = count + 1
        self.last_id = ident
        return (ident, count)

    def copy(self):
        return AddressCursor(self.padding, self.counters, self.last_id)


def log_sum_exp(xs):
    cdef double m = -INFINITY
    cdef double x, total = 0.0
    xs = list(xs)
    for v in xs:
        x = v
        if x > m:
            m = x
    if m == -INFINITY or m == INFINITY:
        return m
    for v in xs:
        x = v
        total += exp(x - m)
    return m + log(total)


def systematic_resample(weights, double u):
    """Indices drawn by systematic resampling.  ``weights`` are normalised,
    ``u`` is a single uniform draw in [0, 1)."""
    cdef Py_ssize_t n = len(weights)
    cdef list out = []
    cdef double cumulative = 0.0, target
    cdef Py_ssize_t i, j = 0, last = n - 1
    ws = [float(x) for x in weights]
    while last > 0 and not ws[last] > 0.0:
        last -= 1
    for i in range(n):
        target = (i + u) / n
        while j < last and cumulative + <double>ws[j] <= target:
            cumulative += <double>ws[j]
            j += 1
        out.append(j)
    return out
