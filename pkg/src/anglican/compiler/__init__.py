from .cps import cps_of_expression
from .emit import QueryError
from .env import CompileEnv, CompileError
from .program import CpsProgram, Program, compile_expression, compile_query, load_program, result_cont

__all__ = [
    "CompileEnv", "CompileError", "CpsProgram", "Program", "QueryError", "compile_expression",
    "compile_query", "cps_of_expression", "load_program", "result_cont",
]
