"""Closure compiler for the CPS target language.

Each IR node becomes a Python function of one argument, the current
frame.  A frame is a list ``[parent, slot1, slot2, ...]``: function
parameters and ``let`` bindings get fixed slots, resolved at compile time
to a (depth, index) pair.  Thunks ``(fn [] ...)`` share their parent's
frame; every other ``fn`` allocates a new one per call.
"""

from operator import itemgetter

from ..checkpoints import ObserveCP, SampleCP
from ..forms import Keyword, List, Quoted, Symbol, Vector
from ..runtime import state as st
from ..runtime.core import PRIMITIVES, _items, resolve_primitive
from ..runtime.distributions import Distribution
from ..runtime.values import PList, form_to_value, pr_str
from .cps import AMP, AS, FN, IF, LET, is_atom
from .env import CompileError


class QueryError(Exception):
    """Runtime error raised by compiled query code."""


def _apply(f, *args):
    if not args:
        raise QueryError("apply expects at least one argument after the function")
    if not callable(f):
        raise QueryError(f"{pr_str(f)} is not a function")
    return f(*args[:-1], *_items(args[-1]))


def _sample_cp(ident, dist, cont, state):
    if not isinstance(dist, Distribution):
        raise QueryError(f"sample expects a distribution, got {pr_str(dist)}")
    return SampleCP(ident, dist, cont, state)


def _observe_cp(ident, dist, value, cont, state):
    if not isinstance(dist, Distribution):
        raise QueryError(f"observe expects a distribution, got {pr_str(dist)}")
    return ObserveCP(ident, dist, value, cont, state)


def _no_match(value):
    raise QueryError(f"no matching case clause for {pr_str(value)}")


BUILTINS = {
    "vector": lambda *xs: xs,
    "hash-map": PRIMITIVES["hash-map"],
    "set": PRIMITIVES["set"],
    "list": lambda *xs: PList(xs),
    "apply": _apply,
    "get": PRIMITIVES["get"],
    "=": PRIMITIVES["="],
    "->sample": _sample_cp,
    "->observe": _observe_cp,
    "in-mem?": st.in_mem,
    "get-mem": st.get_mem,
    "set-mem": st.set_mem,
    "store": st.store,
    "retrieve": st.retrieve,
    "gensym": PRIMITIVES["gensym"],
    "case-no-match": _no_match,
}


class _Frame:
    """Compile-time description of a runtime frame."""

    __slots__ = ("depth", "size")

    def __init__(self, depth):
        self.depth = depth
        self.size = 1


class _Scope:
    __slots__ = ("frame", "names")

    def __init__(self, frame, names):
        self.frame = frame
        self.names = names

    def extend(self, symbols):
        """Allocate slots for ``symbols`` in the current frame."""
        names = dict(self.names)
        slots = []
        for sym in symbols:
            idx = self.frame.size
            self.frame.size += 1
            names[sym] = (self.frame.depth, idx)
            slots.append(idx)
        return _Scope(self.frame, names), slots

    def new_frame(self):
        return _Scope(_Frame(self.frame.depth + 1), self.names)


class Linker:
    """Resolves free symbols.  ``globals`` holds program-level values,
    looked up at call time so forward references work; ``library`` and
    ``host`` are consulted for the prelude and for host-callable
    definitions before falling back to the primitive registry."""

    def __init__(self, globals=None, global_names=(), library=None, host=None):
        self.globals = {} if globals is None else globals
        self.global_names = set(global_names)
        self.library = {} if library is None else library
        self.host = {} if host is None else host

    def resolve(self, sym):
        if sym.uid == -1:
            return True, BUILTINS[sym.name]
        name = sym.name
        if name in self.global_names:
            table = self.globals

            def lookup(_fr):
                try:
                    return table[name]
                except KeyError:
                    raise QueryError(f"global {name} is used before it is defined") from None
            return False, lookup
        if name in self.library:
            return True, self.library[name]
        if name in self.host:
            table = self.host
            return False, lambda _fr: table[name]
        value = resolve_primitive(name)
        if value is None:
            raise CompileError("unable to resolve symbol", sym)
        return True, value


def compile_ir(ir, linker, scope=None):
    """Compile ``ir`` into a function of a frame."""
    if scope is None:
        scope = _Scope(_Frame(0), {})
    return _compile(ir, scope, linker)


def evaluate_ir(ir, linker):
    """Compile and evaluate a closed IR expression."""
    scope = _Scope(_Frame(0), {})
    code = _compile(ir, scope, linker)
    return code([None] * scope.frame.size)


def _const(value):
    return lambda _fr: value


def _compile(ir, scope, linker):
    cls = ir.__class__
    if is_atom(ir):
        return _const(ir)
    if cls is Quoted:
        return _const(form_to_value(ir.inner))
    if cls is Symbol:
        return _variable(ir, scope, linker)
    if cls is List and ir.items:
        head = ir.items[0]
        if head == FN:
            return _fn(ir, scope, linker)
        if head == LET:
            return _let(ir, scope, linker)
        if head == IF:
            return _if(ir, scope, linker)
        return _call(ir, scope, linker)
    if cls is List:
        return _const(PList())
    raise CompileError("unexpected form in target code", ir)


def _variable(sym, scope, linker):
    slot = scope.names.get(sym)
    if slot is None:
        is_const, value = linker.resolve(sym)
        return _const(value) if is_const else value
    depth, idx = slot
    up = scope.frame.depth - depth
    if up == 0:
        return itemgetter(idx)
    if up == 1:
        return lambda fr: fr[0][idx]
    if up == 2:
        return lambda fr: fr[0][0][idx]

    def deep(fr):
        for _ in range(up):
            fr = fr[0]
        return fr[idx]
    return deep


def _if(ir, scope, linker):
    items = ir.items
    test = _compile(items[1], scope, linker)
    then = _compile(items[2], scope, linker)
    else_ = _compile(items[3], scope, linker) if len(items) > 3 else _const(None)

    def if_(fr):
        v = test(fr)
        if v is not None and v is not False:
            return then(fr)
        return else_(fr)
    return if_


# -- destructuring -------------------------------------------------------------

def _pattern_symbols(pat, out):
    if pat.__class__ is Symbol:
        out.append(pat)
    else:
        for item in pat.items:
            if item != AMP and item != AS:
                _pattern_symbols(item, out)
    return out


def _binder(pat, slots):
    """Function ``(frame, value)`` storing the pattern's bindings into
    ``slots``, consumed in the order of :func:`_pattern_symbols`."""
    if pat.__class__ is Symbol:
        idx = slots.pop(0)

        def bind_symbol(fr, value):
            fr[idx] = value
        return bind_symbol
    items = pat.items
    positional, rest, whole = [], None, None
    i = 0
    while i < len(items):
        item = items[i]
        if item == AMP:
            rest = _binder(items[i + 1], slots)
            i += 2
        elif item == AS:
            whole = _binder(items[i + 1], slots)
            i += 2
        else:
            positional.append(_binder(item, slots))
            i += 1
    n = len(positional)

    def bind_vector(fr, value):
        try:
            xs = _items(value)
        except TypeError:
            raise QueryError(f"cannot destructure {pr_str(value)} as a sequence") from None
        for j, b in enumerate(positional):
            b(fr, xs[j] if j < len(xs) else None)
        if rest is not None:
            rest(fr, PList(xs[n:]) if len(xs) > n else None)
        if whole is not None:
            whole(fr, value)
    return bind_vector


def _let(ir, scope, linker):
    bindings = ir.items[1].items
    steps = []
    for i in range(0, len(bindings), 2):
        pat, value = bindings[i], bindings[i + 1]
        code = _compile(value, scope, linker)
        scope, slots = scope.extend(_pattern_symbols(pat, []))
        if pat.__class__ is Symbol:
            steps.append((code, slots[0], None))
        else:
            steps.append((code, None, _binder(pat, slots)))
    body = _compile(ir.items[2], scope, linker)

    if len(steps) == 1 and steps[0][2] is None:
        code, idx, _ = steps[0]

        def let1(fr):
            fr[idx] = code(fr)
            return body(fr)
        return let1

    def let_(fr):
        for code, idx, binder in steps:
            if binder is None:
                fr[idx] = code(fr)
            else:
                binder(fr, code(fr))
        return body(fr)
    return let_


# -- functions -------------------------------------------------------------------

def _fn(ir, scope, linker):
    items = ir.items
    name = None
    if items[1].__class__ is Symbol:
        name, items = items[1], items[1:]
    params, body_ir = items[1], items[2]
    if not params.items and name is None:
        body = _compile(body_ir, scope, linker)
        return lambda fr: lambda: body(fr)

    inner = scope.new_frame()
    if name is not None:
        inner, (name_idx,) = inner.extend([name])
    plist = params.items
    simple = all(p.__class__ is Symbol and p != AMP for p in plist)
    if simple:
        inner, _ = inner.extend(plist)
        binders = None
        n = len(plist)
    else:
        fixed = []
        rest_pat = None
        i = 0
        while i < len(plist):
            if plist[i] == AMP:
                rest_pat = plist[i + 1]
                break
            fixed.append(plist[i])
            i += 1
        n = len(fixed)
        binders = []
        for pat in fixed + ([rest_pat] if rest_pat is not None else []):
            inner, slots = inner.extend(_pattern_symbols(pat, []))
            binders.append(_binder(pat, slots))
    body = _compile(body_ir, inner, linker)
    frame = inner.frame
    label = name.name if name is not None else "fn"

    if simple:
        pad = [None] * (frame.size - 1 - n - (name is not None))
        if name is None:
            if n == 2:
                def make2(fr):
                    def proc(a, b):
                        return body([fr, a, b, *pad])
                    return proc
                return make2

            def make(fr):
                def proc(*args):
                    if len(args) != n:
                        raise _arity_error(label, n - 2, len(args) - 2)
                    return body([fr, *args, *pad])
                return proc
            return make

        def make_named(fr):
            def proc(*args):
                if len(args) != n:
                    raise _arity_error(label, n - 2, len(args) - 2)
                return body([fr, proc, *args, *pad])
            return proc
        return make_named

    has_rest = rest_pat is not None
    size = frame.size

    def make_general(fr):
        def proc(*args):
            if len(args) < n or (not has_rest and len(args) != n):
                raise _arity_error(label, n - 2, len(args) - 2, has_rest)
            new = [None] * size
            new[0] = fr
            if name is not None:
                new[name_idx] = proc
            for b, a in zip(binders[:n], args):
                b(new, a)
            if has_rest:
                binders[-1](new, PList(args[n:]) if len(args) > n else None)
            return body(new)
        return proc
    return make_general


def _arity_error(label, want, got, variadic=False):
    want_text = f"at least {want}" if variadic else str(want)
    return QueryError(f"wrong number of arguments ({got}) passed to {label}, expected {want_text}")


# -- calls -----------------------------------------------------------------------

def _call(ir, scope, linker):
    head = ir.items[0]
    args = [_compile(a, scope, linker) for a in ir.items[1:]]
    n = len(args)
    if head.__class__ is Symbol and head not in scope.names:
        is_const, value = linker.resolve(head)
        if is_const:
            return _const_call(value, args, head)
        f = value
    elif head.__class__ is Keyword or is_atom(head):
        raise CompileError("cannot call a non-function", ir)
    else:
        f = _compile(head, scope, linker)
    if n == 3:
        a, b, c = args
        return lambda fr: f(fr)(a(fr), b(fr), c(fr))
    if n == 2:
        a, b = args
        return lambda fr: f(fr)(a(fr), b(fr))
    return lambda fr: f(fr)(*[a(fr) for a in args])


def _const_call(fn, args, head):
    if not callable(fn):
        raise CompileError("cannot call a non-function", head)
    n = len(args)
    if n == 0:
        return lambda fr: fn()
    if n == 1:
        a, = args
        return lambda fr: fn(a(fr))
    if n == 2:
        a, b = args
        return lambda fr: fn(a(fr), b(fr))
    if n == 3:
        a, b, c = args
        return lambda fr: fn(a(fr), b(fr), c(fr))
    if n == 4:
        a, b, c, d = args
        return lambda fr: fn(a(fr), b(fr), c(fr), d(fr))
    return lambda fr: fn(*[a(fr) for a in args])
