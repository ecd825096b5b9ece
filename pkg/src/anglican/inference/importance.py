"""Likelihood-weighted importance sampling."""

from ..runtime.state import initial_state
from .exec import default_handler, exec_query


def importance(prog, value, rng):
    """Unbounded generator of weighted states; run k uses the k-th split
    of ``rng``."""
    while True:
        yield exec_query(default_handler, prog, value, initial_state, rng.split())
