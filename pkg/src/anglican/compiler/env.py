"""Compile-time environment."""

from ..forms import Symbol
from ..runtime.core import CONSTANTS, PRIMITIVE_NAMESPACES, PRIMITIVES, resolve_primitive

RESERVED = frozenset({"$state", "&"})

SPECIAL_FORMS = frozenset({
    "quote", "if", "if-not", "when", "when-not", "cond", "case", "and", "or", "do",
    "let", "loop", "recur", "fn", "fm", "mem", "sample", "observe", "store", "retrieve",
    "apply",
})


class CompileError(Exception):
    def __init__(self, message, form=None):
        self.message = message
        self.form = form
        if form is not None:
            from ..forms import print_form
            try:
                text = print_form(form)
            except TypeError:
                text = repr(form)
            if len(text) > 120:
                text = text[:117] + "..."
            message = f"{message}: {text}"
        super().__init__(message)


class _Counter:
    __slots__ = ("value",)

    def __init__(self, start):
        self.value = start


class CompileEnv:
    """Primitive registry, lexically bound names and the fresh-symbol
    counter.  Scoping returns new environments; the counter is shared by
    all environments of one compilation."""

    __slots__ = ("primitive_names", "primitive_namespaces", "shadowed", "globals",
                 "recur", "_counter")

    def __init__(self, primitive_names=None, primitive_namespaces=None, shadowed=frozenset(),
                 globals=frozenset(), recur=None, counter=0):
        self.primitive_names = (frozenset(PRIMITIVES) | frozenset(CONSTANTS)
                                if primitive_names is None else frozenset(primitive_names))
        self.primitive_namespaces = (PRIMITIVE_NAMESPACES if primitive_namespaces is None
                                     else frozenset(primitive_namespaces))
        self.shadowed = frozenset(shadowed)
        self.globals = frozenset(globals)
        self.recur = recur
        self._counter = counter if isinstance(counter, _Counter) else _Counter(counter)

    def _derive(self, **changes):
        env = CompileEnv.__new__(CompileEnv)
        env.primitive_names = changes.get("primitive_names", self.primitive_names)
        env.primitive_namespaces = self.primitive_namespaces
        env.shadowed = changes.get("shadowed", self.shadowed)
        env.globals = changes.get("globals", self.globals)
        env.recur = changes.get("recur", self.recur)
        env._counter = self._counter
        return env

    @property
    def fresh_counter(self):
        return self._counter.value

    def fresh(self, prefix):
        self._counter.value += 1
        n = self._counter.value
        return Symbol(f"{prefix}{n}", n)

    def bind(self, symbols):
        return self._derive(shadowed=self.shadowed | frozenset(symbols))

    def with_recur(self, target):
        return self._derive(recur=target)

    def with_globals(self, names, primitives=()):
        return self._derive(globals=self.globals | frozenset(names),
                            primitive_names=self.primitive_names | frozenset(primitives))

    def is_local(self, sym):
        return sym in self.shadowed

    def is_primitive(self, sym):
        """True when ``sym`` names a host function or constant in this scope."""
        if sym.__class__ is not Symbol:
            return False
        if sym.uid == -1:
            return True
        if sym.uid != 0 or sym in self.shadowed or sym.name in self.globals:
            return False
        if sym.name in self.primitive_names:
            return True
        ns = sym.namespace
        return (ns is not None and ns in self.primitive_namespaces
                and resolve_primitive(sym.name) is not None)

    def is_primitive_constant(self, sym):
        if not self.is_primitive(sym) or sym.uid != 0:
            return False
        value = resolve_primitive(sym.name)
        return value is not None and not callable(value)
