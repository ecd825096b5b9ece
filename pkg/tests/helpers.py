"""Shared test utilities: running queries, golden-form comparison and a
direct tree-walking interpreter used as an oracle."""

from anglican.checkpoints import ResultCP
from anglican.compiler import compile_query, result_cont
from anglican.forms import (Keyword, List, MapForm, Quoted, SetForm, Symbol, Vector,
                            alpha_equiv)
from anglican.inference import default_handler, exec_query
from anglican.reader import read_one
from anglican.runtime import Rng, initial_state
from anglican.runtime.core import resolve_primitive
from anglican.runtime.values import HashMap, PList, form_to_value, truthy
from anglican._backend import kernels

K = Keyword


def run(source, value=None, seed=0, handler=default_handler):
    """Result of one run of the single query in ``source``."""
    q = compile_query(source) if isinstance(source, str) else source
    return exec_query(handler, q, value, initial_state, Rng(seed)).result


def run_state(source, value=None, seed=0):
    q = compile_query(source) if isinstance(source, str) else source
    return exec_query(default_handler, q, value, initial_state, Rng(seed))


def steps_of(query, value=None):
    """Final ResultCP of a checkpoint-free query."""
    cp = kernels.trampoline(query.entry(result_cont, initial_state, value), lambda cp: None)
    assert cp.__class__ is ResultCP
    return cp


def strip_builtins(form):
    """Forget the internal-builtin marking so IR compares with read text."""
    cls = form.__class__
    if cls is Symbol and form.uid == -1:
        return Symbol(form.name)
    if cls in (List, Vector, SetForm):
        return cls(strip_builtins(x) for x in form.items)
    if cls is MapForm:
        return MapForm((strip_builtins(k), strip_builtins(v)) for k, v in form.pairs)
    if cls is Quoted:
        return Quoted(strip_builtins(form.inner))
    return form


def golden(text, fresh):
    """Read ``text``; symbols named in ``fresh`` stand for generated names."""
    ids = {name: i + 1 for i, name in enumerate(fresh)}

    def mark(form):
        cls = form.__class__
        if cls is Symbol and form.name in ids:
            return Symbol(form.name, 10_000 + ids[form.name])
        if cls in (List, Vector, SetForm):
            return cls(mark(x) for x in form.items)
        if cls is MapForm:
            return MapForm((mark(k), mark(v)) for k, v in form.pairs)
        if cls is Quoted:
            return Quoted(mark(form.inner))
        return form
    return mark(read_one(text))


def matches_golden(ir, text, fresh):
    return alpha_equiv(strip_builtins(ir), golden(text, fresh))


def count_nodes(form):
    cls = form.__class__
    if cls in (List, Vector, SetForm):
        return 1 + sum(count_nodes(x) for x in form.items)
    if cls is MapForm:
        return 1 + sum(count_nodes(k) + count_nodes(v) for k, v in form.pairs)
    if cls is Quoted:
        return 1 + count_nodes(form.inner)
    return 1


def count_subtree(form, target):
    n = 1 if form == target else 0
    cls = form.__class__
    if cls in (List, Vector, SetForm):
        n += sum(count_subtree(x, target) for x in form.items)
    elif cls is MapForm:
        n += sum(count_subtree(k, target) + count_subtree(v, target) for k, v in form.pairs)
    elif cls is Quoted:
        n += count_subtree(form.inner, target)
    return n


# -- oracle interpreter -----------------------------------------------------------

class _Recur(Exception):
    def __init__(self, args):
        self.args_ = args


class Oracle:
    """Evaluates query forms directly, without CPS.  ``sample`` calls
    ``choose(dist)``; ``observe`` accumulates log-weight."""

    def __init__(self, choose):
        self.choose = choose
        self.log_weight = 0.0

    def eval(self, form, env=None):
        env = {} if env is None else env
        cls = form.__class__
        if cls is Symbol:
            if form.name in env:
                return env[form.name]
            value = resolve_primitive(form.name)
            if value is None:
                raise NameError(form.name)
            return value
        if cls is Quoted:
            return form_to_value(form.inner)
        if cls is Vector:
            return tuple(self.eval(x, env) for x in form.items)
        if cls is MapForm:
            return HashMap((self.eval(k, env), self.eval(v, env)) for k, v in form.pairs)
        if cls is SetForm:
            return frozenset(self.eval(x, env) for x in form.items)
        if cls is not List:
            return form
        if not form.items:
            return PList()
        head, args = form.items[0], form.items[1:]
        name = head.name if head.__class__ is Symbol and head.name not in env else None
        if name == "quote":
            return form_to_value(args[0])
        if name == "if":
            test = self.eval(args[0], env)
            branch = args[1] if truthy(test) else (args[2] if len(args) > 2 else None)
            return self.eval(branch, env)
        if name == "do":
            value = None
            for a in args:
                value = self.eval(a, env)
            return value
        if name == "let":
            env = dict(env)
            b = args[0].items
            for i in range(0, len(b), 2):
                self.bind(b[i], self.eval(b[i + 1], env), env)
            return self.eval(List((Symbol("do"),) + args[1:]), env)
        if name == "loop":
            b = args[0].items
            pats = [b[i] for i in range(0, len(b), 2)]
            env = dict(env)
            values = []
            for i in range(0, len(b), 2):
                v = self.eval(b[i + 1], env)
                self.bind(b[i], v, env)
                values.append(v)
            while True:
                inner = dict(env)
                for p, v in zip(pats, values):
                    self.bind(p, v, inner)
                try:
                    return self.eval(List((Symbol("do"),) + args[1:]), inner)
                except _Recur as r:
                    values = r.args_
        if name == "recur":
            raise _Recur([self.eval(a, env) for a in args])
        if name == "fn":
            params, body = args[0], args[1:]

            def closure(*vals):
                inner = dict(env)
                self.bind(params, vals, inner)
                return self.eval(List((Symbol("do"),) + body), inner)
            return closure
        if name == "and":
            value = True
            for a in args:
                value = self.eval(a, env)
                if not truthy(value):
                    return value
            return value
        if name == "or":
            value = None
            for a in args:
                value = self.eval(a, env)
                if truthy(value):
                    return value
            return value
        if name == "sample":
            return self.choose(self.eval(args[-1], env))
        if name == "observe":
            self.log_weight += self.eval(args[-2], env).observe(self.eval(args[-1], env))
            return None
        f = self.eval(head, env)
        vals = [self.eval(a, env) for a in args]
        if f.__class__ is Keyword:
            return vals[0].get(f, vals[1] if len(vals) > 1 else None)
        return f(*vals)

    def bind(self, pat, value, env):
        if pat.__class__ is Symbol:
            env[pat.name] = value
            return
        items = pat.items
        xs = tuple(value) if value is not None else ()
        i = 0
        j = 0
        while i < len(items):
            if items[i] == Symbol("&"):
                rest = xs[j:]
                self.bind(items[i + 1], PList(rest) if rest else None, env)
                return
            self.bind(items[i], xs[j] if j < len(xs) else None, env)
            i += 1
            j += 1


# -- goodness of fit ------------------------------------------------------------------

def chi_square_z(counts, probs):
    """Standardised chi-square statistic ``(X2 - df) / sqrt(2 df)``."""
    import math
    n = sum(counts)
    x2 = sum((c - n * p) ** 2 / (n * p) for c, p in zip(counts, probs) if p > 0)
    df = sum(1 for p in probs if p > 0) - 1
    return (x2 - df) / math.sqrt(2 * df)


def discrete_fit_z(dist, n, seed):
    from anglican.runtime.values import equals
    support = dist.support()
    rng = Rng(seed)
    counts = [0] * len(support)
    for _ in range(n):
        v = dist.sample(rng)
        idx = next(i for i, s in enumerate(support) if equals(s, v))
        counts[idx] += 1
    import math
    probs = [math.exp(dist.observe(s)) for s in support]
    return chi_square_z(counts, probs)


def continuous_fit_z(dist, n, seed, lo, hi, bins=40):
    """Binned chi-square against bin masses integrated from the density."""
    import math
    from scipy.integrate import quad
    edges = [lo + (hi - lo) * i / bins for i in range(bins + 1)]
    rng = Rng(seed)
    xs = [dist.sample(rng) for _ in range(n)]
    counts = [0] * (bins + 2)
    for x in xs:
        if x < lo:
            counts[0] += 1
        elif x >= hi:
            counts[-1] += 1
        else:
            counts[1 + min(int((x - lo) / (hi - lo) * bins), bins - 1)] += 1

    def density(x):
        return math.exp(dist.observe(float(x)))
    inner = [quad(density, a, b, limit=200)[0] for a, b in zip(edges, edges[1:])]
    below = quad(density, -math.inf, lo, limit=200)[0] if lo > _support_lo(dist) else 0.0
    above = max(0.0, 1.0 - below - sum(inner))
    probs = [below] + inner + [above]
    counts, probs = _merge_small(counts, probs, n)
    return chi_square_z(counts, probs)


def _support_lo(dist):
    return getattr(dist, "lo", 0.0) if dist.kind in ("gamma", "beta", "uniform-continuous") else -float("inf")


def _merge_small(counts, probs, n, minimum=5.0):
    """Fold cells with expected count below ``minimum`` into a neighbour."""
    out_c, out_p = [], []
    acc_c, acc_p = 0, 0.0
    for c, p in zip(counts, probs):
        acc_c += c
        acc_p += p
        if acc_p * n >= minimum:
            out_c.append(acc_c)
            out_p.append(acc_p)
            acc_c, acc_p = 0, 0.0
    if acc_p > 0 or acc_c:
        out_c[-1] += acc_c
        out_p[-1] += acc_p
    return out_c, out_p
