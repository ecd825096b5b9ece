from ..checkpoints import Checkpoint, ObserveCP, ResultCP, SampleCP, continue_
from .addressing import Address, AddressCursor, addresses, checkpoint_id, next_address
from .exec import InferenceError, QueryRuntimeError, default_handler, exec_query
from .importance import importance
from .infer import doquery, infer
from .lmh import TraceEntry, lmh, lmh_step
from .smc import smc, smc_run

__all__ = [
    "Address", "AddressCursor", "Checkpoint", "InferenceError", "ObserveCP", "QueryRuntimeError",
    "ResultCP", "SampleCP", "TraceEntry", "addresses", "checkpoint_id", "continue_",
    "default_handler", "doquery", "exec_query", "importance", "infer", "lmh", "lmh_step",
    "next_address", "smc", "smc_run",
]
