"""Primitive procedures: host functions called directly from compiled
query code, without continuation or state arguments."""

import functools
import itertools
import math
import operator
import sys

from .. import stat
from ..forms import Keyword, Symbol
from .distributions import CONSTRUCTORS, Distribution, observe_star
from .processes import BetaBernoulli, RandomProcess, absorb, produce
from .values import (EMPTY_LIST, HashMap, PList, equals, is_number, pr_str, to_str,
                     truthy)

PRIMITIVES = {}
CONSTANTS = {}


def primitive(*names):
    def register(fn):
        for name in names:
            PRIMITIVES[name] = fn
        return fn
    return register


def _register(name, fn):
    PRIMITIVES[name] = fn


# -- sequences ----------------------------------------------------------------

def _items(coll):
    """Elements of a collection as a tuple (maps yield [k v] entries)."""
    if coll is None:
        return ()
    if isinstance(coll, tuple):
        return coll
    if isinstance(coll, dict):
        return tuple((k, v) for k, v in coll.items())
    if isinstance(coll, frozenset):
        return tuple(sorted(coll, key=pr_str))
    if isinstance(coll, str):
        return tuple(coll)
    raise TypeError(f"don't know how to create a sequence from {pr_str(coll)}")


@primitive("seq")
def seq(coll):
    items = _items(coll)
    return PList(items) if items else None


@primitive("first")
def first(coll):
    items = _items(coll)
    return items[0] if items else None


@primitive("second")
def second(coll):
    items = _items(coll)
    return items[1] if len(items) > 1 else None


@primitive("last")
def last(coll):
    items = _items(coll)
    return items[-1] if items else None


@primitive("rest")
def rest(coll):
    return PList(_items(coll)[1:])


@primitive("next")
def next_(coll):
    items = _items(coll)
    return PList(items[1:]) if len(items) > 1 else None


@primitive("butlast")
def butlast(coll):
    items = _items(coll)
    return PList(items[:-1]) if len(items) > 1 else None


@primitive("nth")
def nth(coll, i, *default):
    items = _items(coll)
    if 0 <= i < len(items):
        return items[i]
    if default:
        return default[0]
    raise IndexError(f"nth: index {i} out of bounds")


@primitive("count")
def count(coll):
    if coll is None:
        return 0
    return len(coll)


@primitive("empty?")
def is_empty(coll):
    return coll is None or len(coll) == 0


@primitive("not-empty")
def not_empty(coll):
    return None if coll is None or len(coll) == 0 else coll


@primitive("cons")
def cons(x, coll):
    return PList((x,) + _items(coll))


@primitive("conj")
def conj(coll, *xs):
    if coll is None:
        coll = EMPTY_LIST
    if coll.__class__ is PList:
        return PList(tuple(reversed(xs)) + coll)
    if isinstance(coll, tuple):
        return coll + xs
    if isinstance(coll, dict):
        kvs = []
        for x in xs:
            kvs.extend(_entry(x))
        return HashMap(coll).assoc(*kvs)
    if isinstance(coll, frozenset):
        return coll | frozenset(xs)
    raise TypeError(f"conj: not a collection: {pr_str(coll)}")


def _entry(x):
    if isinstance(x, tuple) and len(x) == 2:
        return x
    raise TypeError(f"map entry must be a [key value] pair, got {pr_str(x)}")


@primitive("concat")
def concat(*colls):
    return PList(itertools.chain.from_iterable(_items(c) for c in colls))


@primitive("vec")
def vec(coll):
    return tuple(_items(coll))


@primitive("vector")
def vector(*xs):
    return xs


@primitive("list")
def list_(*xs):
    return PList(xs)


@primitive("hash-map")
def hash_map(*kvs):
    if len(kvs) % 2:
        raise ValueError("hash-map needs an even number of arguments")
    return HashMap(zip(kvs[::2], kvs[1::2]))


@primitive("set")
def set_(coll):
    return frozenset(_items(coll))


@primitive("hash-set")
def hash_set(*xs):
    return frozenset(xs)


@primitive("into")
def into(to, coll):
    return conj(to, *_items(coll))


@primitive("get")
def get(coll, key, default=None):
    if coll is None:
        return default
    if isinstance(coll, dict):
        return coll.get(key, default)
    if isinstance(coll, frozenset):
        return key if key in coll else default
    if isinstance(coll, (tuple, str)) and key.__class__ is int:
        return coll[key] if 0 <= key < len(coll) else default
    return default


@primitive("get-in")
def get_in(coll, keys, default=None):
    for k in _items(keys):
        if coll is None:
            return default
        coll = get(coll, k)
    return default if coll is None else coll


@primitive("assoc")
def assoc(coll, *kvs):
    if coll is None:
        coll = HashMap()
    if isinstance(coll, dict):
        return HashMap(coll).assoc(*kvs)
    if isinstance(coll, tuple) and coll.__class__ is not PList:
        out = list(coll)
        for i in range(0, len(kvs), 2):
            k = kvs[i]
            if k == len(out):
                out.append(kvs[i + 1])
            else:
                out[k] = kvs[i + 1]
        return tuple(out)
    raise TypeError(f"assoc: unsupported collection {pr_str(coll)}")


@primitive("dissoc")
def dissoc(m, *ks):
    return None if m is None else HashMap(m).dissoc(*ks)


@primitive("keys")
def keys(m):
    return seq(tuple(m.keys())) if m else None


@primitive("vals")
def vals(m):
    return seq(tuple(m.values())) if m else None


@primitive("contains?")
def contains(coll, key):
    if coll is None:
        return False
    if isinstance(coll, (dict, frozenset)):
        return key in coll
    if isinstance(coll, tuple):
        return key.__class__ is int and 0 <= key < len(coll)
    return False


@primitive("range")
def range_(*args):
    if not args:
        raise TypeError("range: infinite ranges are not supported")
    if all(a.__class__ is int for a in args):
        return PList(range(*args))
    start, end, step = (0, args[0], 1) if len(args) == 1 else (args + (1,))[:3]
    out = []
    x = start
    while (step > 0 and x < end) or (step < 0 and x > end):
        out.append(x)
        x += step
    return PList(out)


@primitive("take")
def take(n, coll):
    return PList(_items(coll)[:max(n, 0)])


@primitive("drop")
def drop(n, coll):
    return PList(_items(coll)[max(n, 0):])


@primitive("reverse")
def reverse(coll):
    return PList(reversed(_items(coll)))


@primitive("sort")
def sort(coll):
    return PList(sorted(_items(coll)))


@primitive("distinct")
def distinct(coll):
    out = []
    for x in _items(coll):
        if not any(equals(x, y) for y in out):
            out.append(x)
    return PList(out)


@primitive("frequencies")
def frequencies(coll):
    out = {}
    for x in _items(coll):
        out[x] = out.get(x, 0) + 1
    return HashMap(out)


@primitive("merge")
def merge(*maps):
    out = {}
    for m in maps:
        if m:
            out.update(m)
    return HashMap(out)


@primitive("peek")
def peek(coll):
    if not coll:
        return None
    return coll[0] if coll.__class__ is PList else coll[-1]


@primitive("pop")
def pop(coll):
    if not coll:
        raise ValueError("can't pop an empty collection")
    return PList(coll[1:]) if coll.__class__ is PList else coll[:-1]


@primitive("subvec")
def subvec(v, start, end=None):
    return tuple(v[start:end])


@primitive("zipmap")
def zipmap(ks, vs):
    return HashMap(zip(_items(ks), _items(vs)))


@primitive("repeat")
def repeat(n, x):
    return PList((x,) * n)


@primitive("flatten")
def flatten(coll):
    out = []

    def walk(x):
        if isinstance(x, tuple):
            for y in x:
                walk(y)
        else:
            out.append(x)
    walk(_items(coll))
    return PList(out)


@primitive("interleave")
def interleave(*colls):
    return PList(itertools.chain.from_iterable(zip(*(_items(c) for c in colls))))


# -- arithmetic and comparison --------------------------------------------------

@primitive("+")
def add(*xs):
    return sum(xs) if xs else 0


@primitive("*")
def mul(*xs):
    return math.prod(xs)


@primitive("-")
def sub(x, *xs):
    if not xs:
        return -x
    for y in xs:
        x = x - y
    return x


def _div2(a, b):
    if a.__class__ is int and b.__class__ is int:
        if b == 0:
            raise ZeroDivisionError("divide by zero")
        q, r = divmod(a, b)
        if r == 0:
            return q
    return a / b


@primitive("/")
def div(x, *xs):
    if not xs:
        return _div2(1, x)
    for y in xs:
        x = _div2(x, y)
    return x


_register("inc", lambda x: x + 1)
_register("dec", lambda x: x - 1)
_register("mod", lambda a, b: a % b)
_register("quot", lambda a, b: int(a / b) if (a.__class__ is float or b.__class__ is float) else
          (abs(a) // abs(b)) * (1 if (a >= 0) == (b >= 0) else -1))
_register("rem", lambda a, b: math.fmod(a, b) if (a.__class__ is float or b.__class__ is float) else
          a - b * ((abs(a) // abs(b)) * (1 if (a >= 0) == (b >= 0) else -1)))
_register("max", max)
_register("min", min)
_register("abs", abs)


def _chain(op):
    def compare(x, *xs):
        for y in xs:
            if not op(x, y):
                return False
            x = y
        return True
    return compare


_register("<", _chain(operator.lt))
_register(">", _chain(operator.gt))
_register("<=", _chain(operator.le))
_register(">=", _chain(operator.ge))
_register("==", _chain(operator.eq))
_register("=", _chain(equals))
_register("not=", lambda *xs: not _chain(equals)(*xs))
_register("not", lambda x: not truthy(x))
_register("identity", lambda x: x)
_register("compare", lambda a, b: (a > b) - (a < b))

_register("nil?", lambda x: x is None)
_register("some?", lambda x: x is not None)
_register("true?", lambda x: x is True)
_register("false?", lambda x: x is False)
_register("zero?", lambda x: x == 0)
_register("pos?", lambda x: x > 0)
_register("neg?", lambda x: x < 0)
_register("even?", lambda x: x % 2 == 0)
_register("odd?", lambda x: x % 2 == 1)
_register("number?", is_number)
_register("integer?", lambda x: x.__class__ is int)
_register("float?", lambda x: x.__class__ is float)
_register("string?", lambda x: x.__class__ is str)
_register("keyword?", lambda x: x.__class__ is Keyword)
_register("symbol?", lambda x: x.__class__ is Symbol)
_register("vector?", lambda x: isinstance(x, tuple) and x.__class__ is not PList)
_register("list?", lambda x: x.__class__ is PList)
_register("seq?", lambda x: x.__class__ is PList)
_register("map?", lambda x: isinstance(x, dict))
_register("set?", lambda x: isinstance(x, frozenset))
_register("coll?", lambda x: isinstance(x, (tuple, dict, frozenset)))
_register("sequential?", lambda x: isinstance(x, tuple))
_register("fn?", lambda x: callable(x) and not isinstance(x, (Keyword, Symbol)))
_register("distribution?", lambda x: isinstance(x, Distribution))
_register("random-process?", lambda x: isinstance(x, RandomProcess))


# -- strings, symbols, output ---------------------------------------------------

_gensym_counter = itertools.count(1)


@primitive("gensym")
def gensym(prefix="G__"):
    n = next(_gensym_counter)
    return Symbol(f"{prefix}{n}")


_register("str", lambda *xs: "".join(to_str(x) for x in xs))
_register("pr-str", lambda *xs: " ".join(pr_str(x) for x in xs))
_register("keyword", lambda name: name if name.__class__ is Keyword else Keyword(to_str(name)))
_register("symbol", lambda name: Symbol(to_str(name)))
_register("name", lambda x: x.name if isinstance(x, (Keyword, Symbol)) else to_str(x))


@primitive("println")
def println(*xs):
    print(" ".join(to_str(x) for x in xs), file=sys.stderr)


@primitive("prn")
def prn(*xs):
    print(" ".join(pr_str(x) for x in xs), file=sys.stderr)


# -- math -----------------------------------------------------------------------

def _log(x):
    if x == 0:
        return -math.inf
    return math.log(x)


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


_MATH = {
    "floor": lambda x: float(math.floor(x)),
    "ceil": lambda x: float(math.ceil(x)),
    "round": lambda x: int(math.floor(x + 0.5)),
    "sqrt": math.sqrt,
    "exp": _exp,
    "log": _log,
    "log10": math.log10,
    "log1p": math.log1p,
    "expm1": math.expm1,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "asin": math.asin,
    "acos": math.acos,
    "atan": math.atan,
    "atan2": math.atan2,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "pow": lambda a, b: float(a) ** b,
    "abs": abs,
    "signum": lambda x: float((x > 0) - (x < 0)),
}

for _name, _fn in _MATH.items():
    PRIMITIVES.setdefault(_name, _fn)
    PRIMITIVES["Math/" + _name] = _fn

_register("double", float)
_register("int", int)
_register("long", int)

CONSTANTS["Math/PI"] = math.pi
CONSTANTS["Math/E"] = math.e


# -- distributions, processes, statistics ------------------------------------------

for _name, _ctor in CONSTRUCTORS.items():
    _register(_name, _ctor)

_register("observe*", observe_star)
_register("beta-bernoulli", BetaBernoulli)
_register("produce", produce)
_register("absorb", absorb)
_register("mean", stat.mean)
_register("std", stat.std)
_register("variance", stat.variance)

PRIMITIVE_NAMESPACES = frozenset({"Math", "clojure.core", "anglican.runtime", "anglican.stat"})


def resolve_primitive(name):
    """Host value for a primitive name (namespaced or not), or ``None``."""
    if name in PRIMITIVES:
        return PRIMITIVES[name]
    if name in CONSTANTS:
        return CONSTANTS[name]
    if "/" in name:
        ns, short = name.split("/", 1)
        if ns in PRIMITIVE_NAMESPACES and ns != "Math":
            return PRIMITIVES.get(short, CONSTANTS.get(short))
    return None


@functools.lru_cache(maxsize=None)
def is_constant(name):
    return name in CONSTANTS
