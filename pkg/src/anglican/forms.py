"""Form tree shared by the reader, the compiler and the IR printer.

Atoms are plain Python values: ``int``, ``float``, ``bool``, ``str`` and
``None`` (nil).  Symbols and keywords get their own classes, as do the
compound forms.  Compound forms compare structurally with type-aware
equality, so ``1``, ``1.0`` and ``true`` are three different keys.
"""

import math


class Symbol:
    """A symbol.  ``uid`` is 0 for symbols written in source text,
    positive for compiler-generated fresh symbols and -1 for references
    to internal builtins that user bindings can never capture."""

    __slots__ = ("name", "uid")

    def __init__(self, name, uid=0):
        self.name = name
        self.uid = uid

    @property
    def namespace(self):
        if "/" in self.name and self.name != "/":
            return self.name.split("/", 1)[0]
        return None

    def __eq__(self, other):
        return (other.__class__ is Symbol and self.name == other.name
                and self.uid == other.uid)

    def __hash__(self):
        return hash((Symbol, self.name, self.uid))

    def __repr__(self):
        return self.name if self.uid == 0 else f"{self.name}#{self.uid}"

    def __str__(self):
        return self.name


class Keyword:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __eq__(self, other):
        return other.__class__ is Keyword and self.name == other.name

    def __hash__(self):
        return hash((Keyword, self.name))

    def __repr__(self):
        return ":" + self.name

    __str__ = __repr__


class _Seq:
    __slots__ = ("items",)

    def __init__(self, items=()):
        self.items = tuple(items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __eq__(self, other):
        return other.__class__ is self.__class__ and _seq_equiv(self.items, other.items)

    def __hash__(self):
        return hash((self.__class__, tuple(struct_key(x) for x in self.items)))

    def __repr__(self):
        return print_form(self)


class List(_Seq):
    __slots__ = ()


class Vector(_Seq):
    __slots__ = ()


class SetForm(_Seq):
    __slots__ = ()

    def __eq__(self, other):
        return (other.__class__ is SetForm
                and {struct_key(x) for x in self.items} == {struct_key(x) for x in other.items})

    def __hash__(self):
        return hash((SetForm, frozenset(struct_key(x) for x in self.items)))


class MapForm:
    """Ordered key/value pairs of a ``{...}`` literal."""

    __slots__ = ("pairs",)

    def __init__(self, pairs=()):
        self.pairs = tuple((k, v) for k, v in pairs)

    def __eq__(self, other):
        if other.__class__ is not MapForm or len(self.pairs) != len(other.pairs):
            return False
        mine = {struct_key(k): v for k, v in self.pairs}
        for k, v in other.pairs:
            key = struct_key(k)
            if key not in mine or not equiv(mine[key], v):
                return False
        return True

    def __hash__(self):
        return hash((MapForm, frozenset((struct_key(k), struct_key(v)) for k, v in self.pairs)))

    def __repr__(self):
        return print_form(self)


class Quoted:
    __slots__ = ("inner",)

    def __init__(self, inner):
        self.inner = inner

    def __eq__(self, other):
        return other.__class__ is Quoted and equiv(self.inner, other.inner)

    def __hash__(self):
        return hash((Quoted, struct_key(self.inner)))

    def __repr__(self):
        return print_form(self)


def struct_key(x):
    """Hashable key under which structurally equal forms collide and
    forms of different atomic types do not."""
    t = x.__class__
    if t is bool:
        return ("b", x)
    if t is int:
        return ("i", x)
    if t is float:
        return ("r", "nan") if x != x else ("r", x)
    if t is str:
        return ("s", x)
    if x is None:
        return ("nil",)
    return x


def _seq_equiv(xs, ys):
    return len(xs) == len(ys) and all(equiv(a, b) for a, b in zip(xs, ys))


def equiv(a, b):
    """Type-aware structural equality on forms."""
    ta, tb = a.__class__, b.__class__
    if ta in (bool, int, float, str) or a is None:
        return ta is tb and (a == b or (ta is float and a != a and b != b))
    return a == b


# -- printing ---------------------------------------------------------------

_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def print_str(s):
    return '"' + "".join(_ESCAPES.get(c, c) for c in s) + '"'


def print_real(x):
    if math.isnan(x):
        return "##NaN"
    if math.isinf(x):
        return "##Inf" if x > 0 else "##-Inf"
    return repr(x)


def print_form(x):
    t = x.__class__
    if x is None:
        return "nil"
    if t is bool:
        return "true" if x else "false"
    if t is int:
        return str(x)
    if t is float:
        return print_real(x)
    if t is str:
        return print_str(x)
    if t is Symbol:
        return x.name
    if t is Keyword:
        return ":" + x.name
    if t is List:
        return "(" + " ".join(print_form(i) for i in x.items) + ")"
    if t is Vector:
        return "[" + " ".join(print_form(i) for i in x.items) + "]"
    if t is SetForm:
        return "#{" + " ".join(print_form(i) for i in x.items) + "}"
    if t is MapForm:
        return "{" + ", ".join(f"{print_form(k)} {print_form(v)}" for k, v in x.pairs) + "}"
    if t is Quoted:
        return "'" + print_form(x.inner)
    raise TypeError(f"not a form: {x!r}")


def pretty(x, width=72, indent=0):
    """Multi-line rendering used by ``check --dump-ir``."""
    flat = print_form(x)
    if len(flat) + indent <= width or x.__class__ not in (List, Vector):
        return flat
    open_, close = ("(", ")") if x.__class__ is List else ("[", "]")
    items = x.items
    head_count = 1
    if x.__class__ is List and items and items[0].__class__ is Symbol:
        if items[0].name in ("fn", "let", "if", "loop") and len(items) > 1:
            head_count = 2
            if items[0].name == "fn" and len(items) > 2 and items[1].__class__ is Symbol:
                head_count = 3
    head = " ".join(print_form(i) for i in items[:head_count])
    lines = [open_ + head]
    for item in items[head_count:]:
        lines.append(" " * (indent + 2) + pretty(item, width, indent + 2))
    return "\n".join(lines) + close


def alpha_equiv(a, b, mapping=None):
    """Structural equality up to a consistent renaming of fresh symbols
    (``uid > 0``)."""
    if mapping is None:
        mapping = ({}, {})
    fwd, back = mapping
    ta = a.__class__
    if ta is Symbol and b.__class__ is Symbol and (a.uid > 0 or b.uid > 0):
        if a.uid <= 0 or b.uid <= 0:
            return False
        if a in fwd or b in back:
            return fwd.get(a) == b and back.get(b) == a
        fwd[a] = b
        back[b] = a
        return True
    if ta is not b.__class__:
        return False
    if ta in (List, Vector, SetForm):
        return len(a) == len(b) and all(alpha_equiv(x, y, mapping) for x, y in zip(a, b))
    if ta is MapForm:
        return len(a.pairs) == len(b.pairs) and all(
            alpha_equiv(k1, k2, mapping) and alpha_equiv(v1, v2, mapping)
            for (k1, v1), (k2, v2) in zip(a.pairs, b.pairs))
    if ta is Quoted:
        return alpha_equiv(a.inner, b.inner, mapping)
    return equiv(a, b)
