"""Lightweight Metropolis-Hastings over addressed traces.

Each step reruns the query from the start.  Sample sites whose address
is in the previous trace reuse the stored value (rescored under the
current distribution) unless that value has zero probability there; the
site picked for resampling and all new sites draw from the prior.
"""

import math
from typing import NamedTuple

from ..checkpoints import ObserveCP, SampleCP, continue_
from ..runtime.state import initial_state
from .addressing import DEFAULT_PADDING, AddressCursor
from .exec import InferenceError, QueryRuntimeError, run_steps, start

NEG_INF = -math.inf


class TraceEntry(NamedTuple):
    value: object
    dist: object
    log_prob: float


class _Recorder:
    __slots__ = ("db", "pick", "rng", "cursor", "trace", "reused_delta", "address")

    def __init__(self, db, pick, rng, padding):
        self.db = db
        self.pick = pick
        self.rng = rng
        self.cursor = AddressCursor(padding)
        self.trace = {}
        self.reused_delta = 0.0
        self.address = None

    def __call__(self, cp):
        addr = self.address = self.cursor.next(cp.id)
        if cp.__class__ is SampleCP:
            dist = cp.dist
            old = None if addr == self.pick else self.db.get(addr)
            if old is not None:
                lp = dist.observe(old.value)
                if lp > NEG_INF:
                    self.reused_delta += lp - old.log_prob
                    self.trace[addr] = TraceEntry(old.value, dist, lp)
                    return continue_(cp.cont, old.value, cp.state)
            value = dist.sample(self.rng)
            self.trace[addr] = TraceEntry(value, dist, dist.observe(value))
            return continue_(cp.cont, value, cp.state)
        if cp.__class__ is ObserveCP:
            lp = cp.dist.observe(cp.value)
            return continue_(cp.cont, None, cp.state.add_log_weight(lp))
        raise InferenceError(f"unexpected checkpoint {cp!r}")


def _run(prog, value, db, pick, rng, padding):
    rec = _Recorder(db, pick, rng, padding)
    try:
        step = start(prog, value, initial_state)
    except Exception as e:
        raise QueryRuntimeError(e, prog.source_name) from e
    state = run_steps(prog, step, rec, rec).state
    return rec.trace, state, rec.reused_delta


def log_acceptance(w_old, w_new, n_old, n_new, reused_delta):
    """Log acceptance ratio of a proposed trace.  ``w_*`` are the total
    observe log-weights, ``n_*`` the trace sizes and ``reused_delta`` the
    summed change in log-probability of reused values."""
    if w_new == NEG_INF:
        return 0.0 if w_old == NEG_INF else NEG_INF
    if w_old == NEG_INF:
        return math.inf
    if n_new == 0:
        return NEG_INF
    return (w_new - w_old) + reused_delta + math.log(n_old) - math.log(n_new)


def lmh_step(db, state, prog, value, rng, padding=DEFAULT_PADDING):
    """One LMH transition.  Returns ``(db', state', accepted)``; on the
    first call pass an empty ``db`` and ``state=None``."""
    if state is None:
        trace, new_state, _ = _run(prog, value, {}, None, rng, padding)
        return trace, new_state, True
    if not db:
        return db, state, False
    keys = list(db)
    pick = keys[rng.randint(len(keys))]
    trace, new_state, delta = _run(prog, value, db, pick, rng, padding)
    ell = log_acceptance(state.log_weight, new_state.log_weight, len(db), len(trace), delta)
    if ell >= 0.0 or rng.random() < math.exp(ell):
        return trace, new_state, True
    return db, state, False


def lmh(prog, value, rng, padding=DEFAULT_PADDING):
    """Unbounded chain of states.  Emitted states carry log-weight 0, as
    every element of a Markov chain counts equally."""
    db, state = {}, None
    while True:
        db, state, accepted = lmh_step(db, state, prog, value, rng, padding)
        yield state._replace(log_weight=0.0, extras={
            **state.extras, "lmh-accepted": accepted, "lmh-log-weight": state.log_weight})
