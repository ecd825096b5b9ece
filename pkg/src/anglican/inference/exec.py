"""Running compiled queries through the trampoline."""

from .._backend import kernels
from ..checkpoints import ObserveCP, SampleCP, continue_
from ..compiler.program import result_cont
from ..runtime.state import initial_state
from ..runtime.values import pr_str
from .addressing import DEFAULT_PADDING, AddressCursor

trampoline = kernels.trampoline


class InferenceError(Exception):
    """Bad use of an inference algorithm (options, model structure)."""


class QueryRuntimeError(Exception):
    """An error raised while evaluating query code."""

    def __init__(self, cause, source_name=None, address=None):
        self.cause = cause
        self.source_name = source_name
        self.address = address
        where = source_name or "<query>"
        if address is not None:
            where += f" at checkpoint [{pr_str(address[0])} {address[1]}]"
        super().__init__(f"{where}: {type(cause).__name__}: {cause}")


def default_handler(cp, rng):
    """Sample from the prior at SampleCPs; add observe* to the log-weight
    at ObserveCPs."""
    if cp.__class__ is SampleCP:
        return continue_(cp.cont, cp.dist.sample(rng), cp.state)
    if cp.__class__ is ObserveCP:
        state = cp.state
        return continue_(cp.cont, None, state.add_log_weight(cp.dist.observe(cp.value)))
    raise InferenceError(f"unexpected checkpoint {cp!r}")


class Tracker:
    """Wraps a handler, recording the address of the latest checkpoint so
    runtime errors can say where they happened."""

    __slots__ = ("handler", "cursor", "address")

    def __init__(self, handler, padding=DEFAULT_PADDING):
        self.handler = handler
        self.cursor = AddressCursor(padding)
        self.address = None

    def __call__(self, cp):
        self.address = self.cursor.next(cp.id)
        return self.handler(cp)


def start(prog, value, state=initial_state):
    return prog.entry(result_cont, state, value)


def run_steps(prog, step, handle, tracker=None):
    """Trampoline ``step`` with ``handle``, wrapping query errors."""
    try:
        return trampoline(step, handle)
    except (InferenceError, QueryRuntimeError):
        raise
    except Exception as e:
        raise QueryRuntimeError(e, prog.source_name, getattr(tracker, "address", None)) from e


def exec_query(handler, prog, value=None, state=initial_state, rng=None):
    """Run ``prog`` to completion and return the final state.  ``handler``
    is called as ``handler(cp, rng)`` at every checkpoint."""
    tracker = Tracker(lambda cp: handler(cp, rng))
    try:
        step = start(prog, value, state)
    except Exception as e:
        raise QueryRuntimeError(e, prog.source_name) from e
    return run_steps(prog, step, tracker, tracker).state
