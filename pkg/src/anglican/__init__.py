"""Probabilistic programming in a Lisp subset: a reader, a CPS compiler
driven by a trampoline, and checkpoint-based inference."""

from ._backend import BACKEND
from .compiler import (CompileEnv, CompileError, CpsProgram, QueryError, compile_expression,
                       compile_query, load_program)
from .inference import (InferenceError, QueryRuntimeError, default_handler, doquery,
                        exec_query, infer)
from .reader import ReadError, read_forms
from .runtime import Rng, State, initial_state

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CompileEnv", "CompileError", "CpsProgram", "InferenceError", "QueryError",
    "QueryRuntimeError", "ReadError", "Rng", "State", "compile_expression", "compile_query",
    "default_handler", "doquery", "exec_query", "infer", "initial_state", "load_program",
    "read_forms",
]
