"""Loading whole source files: top-level definitions and queries."""

from types import FunctionType

from ..checkpoints import ResultCP
from ..forms import List, Symbol, Vector
from ..reader import read_forms
from ..runtime.state import initial_state
from .cps import (FN, STATE, check_binding_symbol, cps_do, ensure_thunk, fn_cps,
                  pattern_symbols)
from .emit import Linker, QueryError, evaluate_ir
from .env import SPECIAL_FORMS, CompileEnv, CompileError

_DEFINERS = ("def", "defm", "defn", "defquery")
_IGNORED = ("ns", "declare", "comment")


class CpsProgram:
    """A compiled query: ``entry(cont, state, value)`` returns a step."""

    def __init__(self, entry, source_name="<query>", name="query", ir=None):
        self.entry = entry
        self.source_name = source_name
        self.name = name
        self.ir = ir

    def __call__(self, cont, state, value=None):
        return self.entry(cont, state, value)

    def __repr__(self):
        return f"<CpsProgram {self.name} from {self.source_name}>"


def result_cont(value, state):
    """Continuation ending a run: sets the result and yields a ResultCP."""
    return ResultCP(state.set_result(value))


def _refuse_checkpoint(cp):
    kind = "sample" if cp.__class__.__name__ == "SampleCP" else "observe"
    raise QueryError(f"{kind} is not allowed in deterministic code (def or defn)")


def run_deterministic(fn, *args):
    """Call a CPS function to completion, refusing any checkpoint."""
    step = fn(result_cont, initial_state, *args)
    while True:
        while step.__class__ is FunctionType:
            step = step()
        if step.__class__ is ResultCP:
            return step.state.result
        _refuse_checkpoint(step)


def _host_wrapper(name, table):
    def host(*args):
        return run_deterministic(table[name], *args)
    host.__name__ = name
    return host


class Program:
    """All definitions and queries of one source file."""

    def __init__(self, source_name="<string>"):
        self.source_name = source_name
        self.globals = {}
        self.host = {}
        self.queries = {}
        self.ir = {}
        self.env = None
        self.linker = None

    def evaluate(self, form):
        """Value of ``form`` evaluated deterministically against this
        program's definitions."""
        ir = _value_ir(form, self.env)
        return run_deterministic(evaluate_ir(ir, self.linker), None)

    def query(self, name=None):
        if name is None:
            if len(self.queries) != 1:
                names = ", ".join(sorted(self.queries)) or "none"
                raise CompileError(f"expected exactly one query, found: {names}; pick one by name")
            return next(iter(self.queries.values()))
        try:
            return self.queries[name]
        except KeyError:
            raise CompileError(f"no query named {name}") from None


def _split_definition(form, kind):
    items = form.items[1:]
    if not items or items[0].__class__ is not Symbol:
        raise CompileError(f"{kind} requires a name", form)
    name = items[0]
    if name.namespace is not None or name.name in SPECIAL_FORMS or name.name in _DEFINERS:
        raise CompileError(f"cannot define reserved name {name.name}", form)
    check_binding_symbol(name, kind)
    rest = items[1:]
    if len(rest) > 1 and rest[0].__class__ is str:
        rest = rest[1:]
    return name.name, rest


def compile_function(form, env):
    """CPS IR for a ``fn`` form."""
    return fn_cps(form, env)


def _query_ir(param, body, env):
    """``(fn [cont $state param] body)`` for a query."""
    cont = env.fresh("cont")
    if param is None:
        param = env.fresh("_")
    scope = env.bind(pattern_symbols(param, "defquery")).with_recur(None)
    code = ensure_thunk(cps_do(tuple(body), cont, scope))
    return List((FN, Vector((cont, STATE, param)), code))


def _value_ir(expr, env):
    """IR of a CPS function of no arguments computing ``expr``."""
    return _query_ir(None, [expr], env)


def load_program(source, source_name="<string>", env=None, library=None, host=None,
                 extra_primitives=()):
    """Compile every top-level form of ``source`` (text or a form list)."""
    forms = read_forms(source) if isinstance(source, str) else list(source)
    if library is None:
        from .prelude import LIBRARY
        library = LIBRARY
    program = Program(source_name)
    if host:
        program.host.update(host)

    global_names, host_names = set(), set()
    bare = []
    for form in forms:
        kind = _definer(form)
        if kind is None:
            bare.append(form)
            continue
        if kind in _IGNORED:
            continue
        name, _ = _split_definition(form, kind)
        if name in global_names or name in host_names:
            raise CompileError(f"{name} is defined twice", form)
        (host_names if kind == "defn" else global_names).add(name)
    if bare and any(_definer(f) == "defquery" for f in forms):
        raise CompileError("top-level expression outside a definition", bare[0])

    base = env if env is not None else CompileEnv()
    env = base.with_globals(global_names | set(library),
                            primitives=host_names | set(extra_primitives))
    linker = Linker(program.globals, global_names, library, program.host)
    program.env, program.linker = env, linker

    for form in forms:
        kind = _definer(form)
        if kind is None or kind in _IGNORED:
            continue
        name, rest = _split_definition(form, kind)
        if kind == "def":
            if len(rest) != 1:
                raise CompileError("def expects a name and one value", form)
            ir = _value_ir(rest[0], env)
            program.ir[name] = ir
            program.globals[name] = run_deterministic(evaluate_ir(ir, linker), None)
        elif kind in ("defm", "defn"):
            if not rest or rest[0].__class__ is not Vector:
                raise CompileError(f"{kind} requires a parameter vector", form)
            fn_form = List((Symbol("fn"), Symbol(name)) + tuple(rest))
            ir = compile_function(fn_form, env)
            program.ir[name] = ir
            value = evaluate_ir(ir, linker)
            if kind == "defm":
                program.globals[name] = value
            else:
                program.host[name + "%cps"] = value
                program.host[name] = _host_wrapper(name + "%cps", program.host)
        else:
            param = None
            if len(rest) > 1 and rest[0].__class__ in (Symbol, Vector):
                param, rest = rest[0], rest[1:]
            ir = _query_ir(param, rest, env)
            program.ir[name] = ir
            entry = evaluate_ir(ir, linker)
            program.queries[name] = CpsProgram(entry, source_name, name, ir)
            program.globals[name] = program.queries[name]

    if bare:
        ir = _query_ir(None, bare, env)
        program.ir["main"] = ir
        program.queries["main"] = CpsProgram(evaluate_ir(ir, linker), source_name, "main", ir)
    return program


def _definer(form):
    if form.__class__ is List and form.items and form.items[0].__class__ is Symbol:
        name = form.items[0].name
        if name in _DEFINERS or name in _IGNORED:
            return name
    return None


def compile_query(source, source_name="<string>", name=None, **kwargs):
    """Compile ``source`` and return its single (or named) query."""
    return load_program(source, source_name, **kwargs).query(name)


def compile_expression(form, env=None, name="query"):
    """Compile one expression as a parameterless query."""
    env = CompileEnv() if env is None else env
    from .prelude import LIBRARY
    env = env.with_globals(set(LIBRARY))
    ir = _query_ir(None, [form], env)
    linker = Linker(library=LIBRARY)
    return CpsProgram(evaluate_ir(ir, linker), "<expression>", name, ir)
