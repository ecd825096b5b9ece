"""Sequential Monte Carlo with systematic resampling at every observe."""

import math

from .._backend import kernels
from ..checkpoints import ObserveCP, ResultCP, SampleCP, continue_
from ..runtime.state import initial_state
from ..runtime.values import pr_str
from .exec import InferenceError, QueryRuntimeError, run_steps, start
from .addressing import DEFAULT_PADDING, AddressCursor

log_sum_exp = kernels.log_sum_exp
systematic_resample = kernels.systematic_resample


class _Particle:
    """Advances one particle: samples from the prior, suspends at observes."""

    __slots__ = ("rng", "cursor", "address")

    def __init__(self, rng, padding):
        self.rng = rng
        self.cursor = AddressCursor(padding)
        self.address = None

    def __call__(self, cp):
        self.address = self.cursor.next(cp.id)
        if cp.__class__ is SampleCP:
            return continue_(cp.cont, cp.dist.sample(self.rng), cp.state)
        return None


def smc_run(prog, value, n_particles, rng, padding=DEFAULT_PADDING):
    """One SMC epoch of ``n_particles``; returns the final states.  Each
    carries the log marginal-likelihood estimate under
    ``extras['log-marginal']``."""
    if n_particles < 1:
        raise InferenceError("number of particles must be at least 1")
    n = n_particles
    particles = [_Particle(rng.split(), padding) for _ in range(n)]
    try:
        steps = [start(prog, value, initial_state) for _ in range(n)]
    except Exception as e:
        raise QueryRuntimeError(e, prog.source_name) from e
    log_marginal = 0.0
    while True:
        cps = [run_steps(prog, s, p, p) for s, p in zip(steps, particles)]
        done = [cp.__class__ is ResultCP for cp in cps]
        if all(done):
            break
        if any(done):
            i = done.index(False)
            addr = particles[i].address
            raise InferenceError(
                "particles disagree on the number of observes: some finished while "
                f"others are at observe [{pr_str(addr[0])} {addr[1]}]")
        states = []
        for cp in cps:
            if cp.__class__ is not ObserveCP:
                raise InferenceError(f"unexpected checkpoint {cp!r}")
            try:
                lp = cp.dist.observe(cp.value)
            except Exception as e:
                raise QueryRuntimeError(e, prog.source_name, particles[0].address) from e
            states.append(cp.state.add_log_weight(lp))
        lws = [s.log_weight for s in states]
        total = log_sum_exp(lws)
        if total == -math.inf:
            raise InferenceError("all particles have zero weight")
        mean_lw = total - math.log(n)
        # weights entered the barrier equal, so the running estimate is the mean
        log_marginal = mean_lw
        weights = [math.exp(lw - total) for lw in lws]
        idx = systematic_resample(weights, rng.random())
        conts = [cp.cont for cp in cps]
        cursors = [p.cursor for p in particles]
        steps = []
        for slot, j in enumerate(idx):
            particles[slot].cursor = cursors[j].copy()
            steps.append(continue_(conts[j], None, states[j].set_log_weight(mean_lw)))
    return [cp.state.set_extra("log-marginal", log_marginal) for cp in cps]


def smc(prog, value, rng, particles=1, padding=DEFAULT_PADDING):
    """Unbounded sequence of states, produced one epoch at a time."""
    while True:
        yield from smc_run(prog, value, particles, rng, padding)
