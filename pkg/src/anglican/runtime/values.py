"""Runtime value representation.

Vectors are tuples, lists are :class:`PList` (a tuple subclass, so
sequential equality across the two holds as in Clojure), maps are
:class:`HashMap` and sets are frozensets.  nil is ``None``.
"""

import math

from ..forms import Keyword, List, MapForm, Quoted, SetForm, Symbol, Vector, print_real, print_str


class PList(tuple):
    """Immutable list (``'(1 2 3)``, ``cons``, ``seq``)."""

    __slots__ = ()

    def __repr__(self):
        return pr_str(self)


EMPTY_LIST = PList()


class HashMap(dict):
    """Immutable-by-convention, hashable map.  Functional updates only."""

    __slots__ = ()

    def __hash__(self):
        return hash(frozenset(self.items()))

    def assoc(self, *kvs):
        m = HashMap(self)
        for i in range(0, len(kvs), 2):
            dict.__setitem__(m, kvs[i], kvs[i + 1])
        return m

    def dissoc(self, *ks):
        m = HashMap(self)
        for k in ks:
            dict.pop(m, k, None)
        return m

    def _immutable(self, *args, **kwargs):
        raise TypeError("HashMap is immutable")

    __setitem__ = __delitem__ = update = pop = popitem = clear = setdefault = _immutable

    def __repr__(self):
        return pr_str(self)


def truthy(v):
    return v is not None and v is not False


def is_number(v):
    t = v.__class__
    return (t is int or t is float) and t is not bool


def equals(a, b):
    """Clojure ``=``: type-aware deep equality."""
    if a is b:
        return True
    ta, tb = a.__class__, b.__class__
    if ta is bool or tb is bool:
        return ta is tb and a == b
    if ta in (int, float) and tb in (int, float):
        return ta is tb and a == b
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(equals(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        if len(a) != len(b):
            return False
        for k, v in a.items():
            if k not in b or not equals(v, b[k]):
                return False
        return True
    if isinstance(a, frozenset) and isinstance(b, frozenset):
        return a == b
    return a == b


def form_to_value(form):
    """Convert a quoted form into the runtime value it denotes."""
    t = form.__class__
    if t is List:
        return PList(form_to_value(x) for x in form.items)
    if t is Vector:
        return tuple(form_to_value(x) for x in form.items)
    if t is MapForm:
        return HashMap((form_to_value(k), form_to_value(v)) for k, v in form.pairs)
    if t is SetForm:
        return frozenset(form_to_value(x) for x in form.items)
    if t is Quoted:
        return PList((Symbol("quote"), form_to_value(form.inner)))
    return form


def _sorted_by_print(items):
    return sorted(items, key=pr_str)


def pr_str(v):
    """Readable printed representation (strings quoted)."""
    t = v.__class__
    if v is None:
        return "nil"
    if t is bool:
        return "true" if v else "false"
    if t is int:
        return str(v)
    if t is float:
        return print_real(v)
    if t is str:
        return print_str(v)
    if t is Symbol:
        return v.name
    if t is Keyword:
        return ":" + v.name
    if t is PList:
        return "(" + " ".join(pr_str(x) for x in v) + ")"
    if isinstance(v, tuple):
        return "[" + " ".join(pr_str(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{pr_str(k)} {pr_str(x)}" for k, x in v.items()) + "}"
    if isinstance(v, frozenset):
        return "#{" + " ".join(_sorted_by_print(pr_str(x) for x in v)) + "}"
    if callable(v):
        return "#function"
    return repr(v)


def to_str(v):
    """``str`` semantics: strings unquoted, nil empty."""
    if v is None:
        return ""
    if v.__class__ is str:
        return v
    return pr_str(v)


def to_json(v):
    """JSON-compatible rendering.  Keywords and symbols carry a ``:`` or
    ``'`` sigil; non-finite reals become strings."""
    t = v.__class__
    if v is None or t is bool or t is int or t is str:
        return v
    if t is float:
        if math.isfinite(v):
            return v
        return "nan" if v != v else ("inf" if v > 0 else "-inf")
    if t is Keyword:
        return ":" + v.name
    if t is Symbol:
        return "'" + v.name
    if isinstance(v, tuple):
        return [to_json(x) for x in v]
    if isinstance(v, dict):
        out = {}
        for k, x in v.items():
            key = k if k.__class__ is str else to_json(k)
            out[key if isinstance(key, str) else pr_str(k)] = to_json(x)
        return out
    if isinstance(v, frozenset):
        return [to_json(x) for x in sorted(v, key=pr_str)]
    if hasattr(v, "to_json"):
        return v.to_json()
    return pr_str(v)
