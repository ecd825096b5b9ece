"""CPS transformation of query forms.

The output is itself a form tree in a small target language:

    (fn name? [params] body)   (let [pattern value ...] body)
    (if test then else)        'quoted       (head args...)

Every function produced here takes ``cont`` and ``$state`` in front of
its own parameters, every continuation takes ``(value, $state)``, and
every tail call is either a thunk ``(fn [] ...)`` or a checkpoint
constructor, so the emitted closures can be driven by a trampoline.

Symbols with ``uid == -1`` refer to internal builtins and are never
captured by user bindings; fresh symbols (``uid > 0``) cannot be either.
"""

from ..forms import Keyword, List, MapForm, Quoted, SetForm, Symbol, Vector, struct_key
from .env import RESERVED, SPECIAL_FORMS, CompileError

FN = Symbol("fn")
LET = Symbol("let")
IF = Symbol("if")
STATE = Symbol("$state")
AMP = Symbol("&")
AS = Keyword("as")
ELSE = Keyword("else")


def builtin(name):
    return Symbol(name, -1)


B_VECTOR = builtin("vector")
B_HASH_MAP = builtin("hash-map")
B_SET = builtin("set")
B_LIST = builtin("list")
B_APPLY = builtin("apply")
B_GET = builtin("get")
B_EQ = builtin("=")
B_SAMPLE = builtin("->sample")
B_OBSERVE = builtin("->observe")
B_IN_MEM = builtin("in-mem?")
B_GET_MEM = builtin("get-mem")
B_SET_MEM = builtin("set-mem")
B_STORE = builtin("store")
B_RETRIEVE = builtin("retrieve")
B_GENSYM = builtin("gensym")
B_NO_MATCH = builtin("case-no-match")
B_FN_RECUR = builtin("fn-recur")

_ATOMS = (bool, int, float, str, Keyword)


class ContLambda:
    """A continuation still under construction: ``(fn [param $state] body)``.
    Applied to a value it is beta-reduced to a ``let``."""

    __slots__ = ("param", "body")

    def __init__(self, param, body):
        self.param = param
        self.body = body


def _sym(name):
    return Symbol(name)


def is_atom(form):
    return form is None or form.__class__ in _ATOMS


def thunk(code):
    return List((FN, Vector(()), code))


def returns_immediately(code):
    """True when evaluating ``code`` does bounded work and yields a step."""
    if code.__class__ is not List or not code.items:
        return False
    head = code.items[0]
    if head == FN:
        return len(code.items) == 3 and code.items[1].__class__ is Vector and not code.items[1].items
    if head == B_SAMPLE or head == B_OBSERVE:
        return True
    if head == IF:
        return all(returns_immediately(branch) for branch in code.items[2:])
    if head == LET:
        return returns_immediately(code.items[-1])
    return False


def ensure_thunk(code):
    return code if returns_immediately(code) else thunk(code)


def make_let(bindings, body):
    """``(let [bindings] body)``, merged with ``body`` when it is a let."""
    if not bindings:
        return body
    if body.__class__ is List and body.items and body.items[0] == LET:
        return List((LET, Vector(tuple(bindings) + body.items[1].items), body.items[2]))
    return List((LET, Vector(bindings), body))


def materialize(k):
    if k.__class__ is ContLambda:
        return List((FN, Vector((k.param, STATE)), ensure_thunk(k.body)))
    return k


def call_cont(k, value, state=STATE):
    if k.__class__ is ContLambda:
        bindings = [k.param, value]
        if state != STATE:
            bindings += [STATE, state]
        return make_let(bindings, k.body)
    return List((k, value, state))


# -- patterns ------------------------------------------------------------------

def check_binding_symbol(sym, where):
    if sym.__class__ is not Symbol:
        raise CompileError(f"invalid binding in {where}", sym)
    if sym.uid == 0:
        if sym.name in RESERVED or sym.namespace is not None:
            raise CompileError(f"cannot bind reserved name in {where}", sym)
        if sym.name in SPECIAL_FORMS:
            raise CompileError(f"cannot bind special form name in {where}", sym)


def pattern_symbols(pat, where="let", out=None):
    """Symbols bound by a destructuring pattern, validating it on the way."""
    if out is None:
        out = []
    if pat.__class__ is Symbol:
        check_binding_symbol(pat, where)
        out.append(pat)
        return out
    if pat.__class__ is MapForm:
        raise CompileError(f"map destructuring is not supported in {where}", pat)
    if pat.__class__ is not Vector:
        raise CompileError(f"invalid binding pattern in {where}", pat)
    items = pat.items
    i = 0
    while i < len(items):
        item = items[i]
        if item == AMP:
            if i + 1 >= len(items):
                raise CompileError(f"missing pattern after & in {where}", pat)
            pattern_symbols(items[i + 1], where, out)
            i += 2
            if i < len(items) and items[i] != AS:
                raise CompileError(f"only one pattern may follow & in {where}", pat)
            continue
        if item == AS:
            if i + 2 != len(items) or items[i + 1].__class__ is not Symbol:
                raise CompileError(f":as must be followed by one symbol at the end in {where}", pat)
            pattern_symbols(items[i + 1], where, out)
            break
        pattern_symbols(item, where, out)
        i += 1
    return out


# -- the transformer -----------------------------------------------------------

def _expect_args(form, lo, hi=None, name=None):
    n = len(form.items) - 1
    if n < lo or (hi is not None and n > hi):
        name = name or form.items[0].name
        if hi is None:
            want = f"at least {lo}"
        elif lo == hi:
            want = str(lo)
        else:
            want = f"{lo} to {hi}"
        raise CompileError(f"{name} expects {want} argument(s), got {n}", form)


def _head_name(form):
    """Name of a special form heading ``form``, or ``None``."""
    if form.__class__ is not List or not form.items:
        return None
    head = form.items[0]
    if head.__class__ is Symbol and head.uid == 0 and head.name in SPECIAL_FORMS:
        return head.name
    if head == B_FN_RECUR:
        return "fn-recur"
    return None


def opaque(form, env):
    """True when ``form`` can be evaluated whole, without checkpoints or
    CPS calls, and handed straight to a continuation."""
    cls = form.__class__
    if is_atom(form) or cls is Symbol or cls is Quoted:
        return True
    if cls is Vector or cls is SetForm:
        return all(opaque(x, env) for x in form.items)
    if cls is MapForm:
        return all(opaque(k, env) and opaque(v, env) for k, v in form.pairs)
    if cls is not List:
        return False
    if not form.items:
        return True
    special = _head_name(form)
    if special is not None:
        if special in ("quote", "fn", "fm", "fn-recur"):
            return True
        if special == "mem":
            return len(form.items) == 2 and opaque(form.items[1], env)
        if special == "apply":
            return (len(form.items) >= 3 and env.is_primitive(form.items[1])
                    and all(opaque(a, env) for a in form.items[2:]))
        return False
    head = form.items[0]
    if head.__class__ is Keyword or (head.__class__ is Symbol and env.is_primitive(head)
                                     and not env.is_primitive_constant(head)):
        return all(opaque(a, env) for a in form.items[1:])
    return False


def _trivial(ir):
    return is_atom(ir) or ir.__class__ in (Symbol, Quoted)


def resolve_value(sym, env):
    """IR for a symbol in value position."""
    if sym.uid != 0 or sym == STATE or sym in env.shadowed or sym.name in env.globals:
        return sym
    if env.is_primitive(sym):
        if env.is_primitive_constant(sym):
            return sym
        return primitive_procedure_cps(sym, env)
    if sym.name in SPECIAL_FORMS:
        raise CompileError("cannot take the value of a special form", sym)
    raise CompileError("unable to resolve symbol", sym)


def primitive_procedure_cps(sym, env):
    """A primitive used as a value becomes a CPS function wrapping it."""
    c, p = env.fresh("C"), env.fresh("P")
    body = thunk(List((c, List((B_APPLY, sym, p)), STATE)))
    return List((FN, Vector((c, STATE, AMP, p)), body))


def opaque_cps(form, env):
    cls = form.__class__
    if is_atom(form):
        return form
    if cls is Symbol:
        return resolve_value(form, env)
    if cls is Quoted:
        return form
    if cls is Vector:
        return List((B_VECTOR,) + tuple(opaque_cps(x, env) for x in form.items))
    if cls is MapForm:
        out = [B_HASH_MAP]
        for k, v in form.pairs:
            out += [opaque_cps(k, env), opaque_cps(v, env)]
        return List(out)
    if cls is SetForm:
        return List((B_SET, List((B_LIST,) + tuple(opaque_cps(x, env) for x in form.items))))
    if not form.items:
        return Quoted(List(()))
    special = _head_name(form)
    items = form.items
    if special == "quote":
        _expect_args(form, 1, 1)
        return Quoted(items[1])
    if special in ("fn", "fm"):
        return fn_cps(form, env)
    if special == "fn-recur":
        return fn_cps(form, env, recur=True)
    if special == "mem":
        return mem_cps(items[1], env)
    if special == "apply":
        return List((B_APPLY, items[1]) + tuple(opaque_cps(a, env) for a in items[2:]))
    head = items[0]
    args = tuple(opaque_cps(a, env) for a in items[1:])
    if head.__class__ is Keyword:
        return _keyword_call(form, head, args)
    return List((head,) + args)


def _keyword_call(form, kw, args):
    if not 1 <= len(args) <= 2:
        raise CompileError("keyword lookup expects 1 or 2 arguments", form)
    return List((B_GET, args[0], kw) + args[1:])


def name_cont(k, env):
    """Bind a non-symbol continuation to a fresh name, so that branches
    can reference it without duplicating its code."""
    if k.__class__ is Symbol:
        return k, lambda code: code
    name = env.fresh("cont")
    value = materialize(k)
    return name, lambda code: List((LET, Vector((name, value)), code))


def cps_tail(form, k, env):
    """Branch code calling the named continuation ``k`` via a thunk."""
    if opaque(form, env):
        return thunk(call_cont(k, opaque_cps(form, env)))
    return cps_of(form, k, env)


def chain_args(forms, finish, env):
    """Evaluate ``forms`` left to right, then ``finish(values)``."""
    forms = list(forms)
    n = len(forms)
    later_effect = [False] * (n + 1)
    for i in range(n - 1, -1, -1):
        later_effect[i] = later_effect[i + 1] or not opaque(forms[i], env)

    def go(i, values):
        if i == n:
            return finish(values)
        f = forms[i]
        if opaque(f, env):
            ir = opaque_cps(f, env)
            if later_effect[i + 1] and not _trivial(ir) and not _is_fn_ir(ir):
                a = env.fresh("a")
                return make_let([a, ir], go(i + 1, values + [a]))
            return go(i + 1, values + [ir])
        a = env.fresh("a")
        return cps_of(f, ContLambda(a, go(i + 1, values + [a])), env)

    return go(0, [])


def _is_fn_ir(ir):
    return ir.__class__ is List and ir.items and ir.items[0] == FN


def cps_of(form, k, env):
    """CPS transform of ``form`` with continuation ``k`` (a symbol, a raw
    IR expression or a :class:`ContLambda`)."""
    if opaque(form, env):
        return call_cont(k, opaque_cps(form, env))
    cls = form.__class__
    if cls is Vector:
        return chain_args(form.items, lambda vs: call_cont(k, List((B_VECTOR,) + tuple(vs))), env)
    if cls is SetForm:
        return chain_args(form.items, lambda vs: call_cont(
            k, List((B_SET, List((B_LIST,) + tuple(vs))))), env)
    if cls is MapForm:
        flat = [x for pair in form.pairs for x in pair]
        return chain_args(flat, lambda vs: call_cont(k, List((B_HASH_MAP,) + tuple(vs))), env)
    special = _head_name(form)
    if special is not None:
        return _SPECIAL[special](form, k, env)
    return cps_application(form, k, env)


def cps_application(form, k, env):
    head, args = form.items[0], form.items[1:]
    if head.__class__ is Keyword:
        return chain_args(args, lambda vs: call_cont(k, _keyword_call(form, head, tuple(vs))), env)
    if head.__class__ is Symbol and env.is_primitive(head) and not env.is_primitive_constant(head):
        return chain_args(args, lambda vs: call_cont(k, List((head,) + tuple(vs))), env)
    return chain_args((head,) + args,
                      lambda vs: List((vs[0], materialize(k), STATE) + tuple(vs[1:])), env)


# -- special forms ---------------------------------------------------------------

def _if(form, k, env):
    _expect_args(form, 2, 3)
    items = form.items
    return cps_if(items[1], items[2], items[3] if len(items) > 3 else None, k, env)


def cps_if(test, then, else_, k, env):
    name, wrap = name_cont(k, env)
    then_ir = cps_tail(then, name, env)
    else_ir = cps_tail(else_, name, env)
    if opaque(test, env):
        return wrap(List((IF, opaque_cps(test, env), then_ir, else_ir)))
    g = env.fresh("c")
    return wrap(cps_of(test, ContLambda(g, List((IF, g, then_ir, else_ir))), env))


def _if_not(form, k, env):
    _expect_args(form, 2, 3)
    items = form.items
    return cps_if(items[1], items[3] if len(items) > 3 else None, items[2], k, env)


def _when(form, k, env):
    _expect_args(form, 1)
    return cps_if(form.items[1], _do_form(form.items[2:]), None, k, env)


def _when_not(form, k, env):
    _expect_args(form, 1)
    return cps_if(form.items[1], None, _do_form(form.items[2:]), k, env)


def _do_form(body):
    if len(body) == 1:
        return body[0]
    return List((_sym("do"),) + tuple(body))


def _cond(form, k, env):
    clauses = form.items[1:]
    if len(clauses) % 2:
        raise CompileError("cond requires an even number of forms", form)
    if not clauses:
        return cps_of(None, k, env)
    expr = None
    for i in range(len(clauses) - 2, -1, -2):
        test, result = clauses[i], clauses[i + 1]
        expr = List((_sym("if"), test, result, expr))
    return cps_of(expr, k, env)


def _case(form, k, env):
    _expect_args(form, 1)
    clauses = form.items[2:]
    default = None
    has_default = len(clauses) % 2 == 1
    if has_default:
        default, clauses = clauses[-1], clauses[:-1]
    g = env.fresh("case")
    seen = set()
    for i in range(0, len(clauses), 2):
        test = clauses[i]
        for c in (test.items if test.__class__ is List and test.items else (test,)):
            key = struct_key(c)
            if key in seen:
                raise CompileError("duplicate case test constant", c)
            seen.add(key)

    def constant(c):
        return c if is_atom(c) else Quoted(c)

    expr = default if has_default else List((B_NO_MATCH, g))
    for i in range(len(clauses) - 2, -1, -2):
        test, result = clauses[i], clauses[i + 1]
        if test.__class__ is List and test.items:
            tests = [List((B_EQ, g, constant(c))) for c in test.items]
            cond = tests[0] if len(tests) == 1 else List((_sym("or"),) + tuple(tests))
        else:
            cond = List((B_EQ, g, constant(test)))
        expr = List((_sym("if"), cond, result, expr))
    return cps_of(List((_sym("let"), Vector((g, form.items[1])), expr)), k, env)


def _and(form, k, env):
    args = form.items[1:]
    if not args:
        return cps_of(True, k, env)
    if len(args) == 1:
        return cps_of(args[0], k, env)
    g = env.fresh("and")
    rest = List((_sym("and"),) + args[1:])
    return cps_of(List((_sym("let"), Vector((g, args[0])), List((_sym("if"), g, rest, g)))), k, env)


def _or(form, k, env):
    args = form.items[1:]
    if not args:
        return cps_of(None, k, env)
    if len(args) == 1:
        return cps_of(args[0], k, env)
    g = env.fresh("or")
    rest = List((_sym("or"),) + args[1:])
    return cps_of(List((_sym("let"), Vector((g, args[0])), List((_sym("if"), g, g, rest)))), k, env)


def _do(form, k, env):
    return cps_do(form.items[1:], k, env)


def cps_do(forms, k, env):
    if not forms:
        return call_cont(k, None)
    if len(forms) == 1:
        return cps_of(forms[0], k, env)
    first, rest = forms[0], forms[1:]
    if opaque(first, env):
        ir = opaque_cps(first, env)
        if _trivial(ir) or _is_fn_ir(ir):
            return cps_do(rest, k, env)
        return make_let([env.fresh("_"), ir], cps_do(rest, k, env))
    return cps_of(first, ContLambda(env.fresh("_"), cps_do(rest, k, env)), env)


def _binding_pairs(form, bindings, where):
    if bindings.__class__ is not Vector:
        raise CompileError(f"{where} requires a vector for its bindings", form)
    if len(bindings.items) % 2:
        raise CompileError(f"{where} requires an even number of forms in binding vector", form)
    items = bindings.items
    return [(items[i], items[i + 1]) for i in range(0, len(items), 2)]


def _let(form, k, env):
    _expect_args(form, 1)
    pairs = _binding_pairs(form, form.items[1], "let")
    return cps_let(pairs, form.items[2:], k, env)


def cps_let(pairs, body, k, env):
    def go(i, env):
        if i == len(pairs):
            return cps_do(body, k, env)
        pat, expr = pairs[i]
        inner = env.bind(pattern_symbols(pat, "let"))
        if opaque(expr, env):
            value = opaque_cps(expr, env)
            return make_let([pat, value], go(i + 1, inner))
        return cps_of(expr, ContLambda(pat, go(i + 1, inner)), env)
    return go(0, env)


def _loop(form, k, env):
    _expect_args(form, 1)
    pairs = _binding_pairs(form, form.items[1], "loop")
    for pat, _ in pairs:
        pattern_symbols(pat, "loop")
    name = env.fresh("loop")
    gs = [env.fresh("g") for _ in pairs]
    outer = []
    for g, (pat, expr) in zip(gs, pairs):
        outer += [g, expr, pat, g]
    inner_let = List((_sym("let"), Vector(tuple(x for g, (pat, _) in zip(gs, pairs) for x in (pat, g))))
                     + form.items[2:])
    loop_fn = List((B_FN_RECUR, name, Vector(gs), inner_let))
    call = List((loop_fn,) + tuple(gs))
    return cps_let([(outer[i], outer[i + 1]) for i in range(0, len(outer), 2)], [call], k, env)


def _recur(form, k, env):
    if env.recur is None:
        raise CompileError("recur outside of loop", form)
    name, arity = env.recur
    n = len(form.items) - 1
    if n != arity:
        raise CompileError(f"recur expects {arity} argument(s), got {n}", form)
    return cps_application(List((name,) + form.items[1:]), k, env)


def fn_cps(form, env, recur=False):
    items = form.items[1:]
    name = None
    if items and items[0].__class__ is Symbol:
        name = items[0]
        check_binding_symbol(name, "fn")
        items = items[1:]
    if not items:
        raise CompileError("fn requires a parameter vector", form)
    params = items[0]
    if params.__class__ is List:
        raise CompileError("multi-arity fn is not supported", form)
    if params.__class__ is not Vector:
        raise CompileError("fn requires a parameter vector", form)
    bound = pattern_symbols(params, "fn")
    names = [s for s in bound if s.name != "_"]
    if len(set(names)) != len(names):
        dup = next(s for s in names if names.count(s) > 1)
        raise CompileError(f"duplicate parameter {dup.name}", form)
    cont = env.fresh("cont")
    scope = env.bind(bound + ([name] if name is not None else []))
    scope = scope.with_recur((name, len(params.items)) if recur else None)
    body = ensure_thunk(cps_do(items[1:], cont, scope))
    head = (FN, name) if name is not None else (FN,)
    return List(head + (Vector((cont, STATE) + params.items), body))


def mem_cps(arg, env):
    f = opaque_cps(arg, env)
    m, c, p, v = env.fresh("M"), env.fresh("C"), env.fresh("P"), env.fresh("V")
    mem_name = env.fresh("mem")
    bindings = [m, List((B_GENSYM, "M"))]
    if f.__class__ is not Symbol:
        fname = env.fresh("F")
        bindings += [fname, f]
        f = fname
    hit = thunk(List((c, List((B_GET_MEM, STATE, m, p)), STATE)))
    store_k = List((FN, Vector((v, STATE)), thunk(List((c, v, List((B_SET_MEM, STATE, m, p, v)))))))
    miss = List((B_APPLY, f, store_k, STATE, p))
    body = List((IF, List((B_IN_MEM, STATE, m, p)), hit, miss))
    fn = List((FN, mem_name, Vector((c, STATE, AMP, p)), body))
    return List((LET, Vector(bindings), fn))


def _mem(form, k, env):
    _expect_args(form, 1, 1)
    f = env.fresh("f")
    return cps_of(form.items[1], ContLambda(f, call_cont(k, mem_cps(f, env.bind([f])))), env)


def _apply(form, k, env):
    _expect_args(form, 2)
    f, args = form.items[1], form.items[2:]
    if f.__class__ is Symbol and env.is_primitive(f) and not env.is_primitive_constant(f):
        return chain_args(args, lambda vs: call_cont(k, List((B_APPLY, f) + tuple(vs))), env)
    return chain_args((f,) + args, lambda vs: List(
        (B_APPLY, vs[0], materialize(k), STATE) + tuple(vs[1:])), env)


def _sample(form, k, env):
    _expect_args(form, 1, 2)
    args = form.items[1:]
    fresh_id = Quoted(env.fresh("S")) if len(args) == 1 else None

    def finish(vs):
        ident = fresh_id if fresh_id is not None else vs[0]
        return List((B_SAMPLE, ident, vs[-1], materialize(k), STATE))
    return chain_args(args, finish, env)


def _observe(form, k, env):
    _expect_args(form, 2, 3)
    args = form.items[1:]
    fresh_id = Quoted(env.fresh("O")) if len(args) == 2 else None

    def finish(vs):
        ident = fresh_id if fresh_id is not None else vs[0]
        return List((B_OBSERVE, ident, vs[-2], vs[-1], materialize(k), STATE))
    return chain_args(args, finish, env)


def _store(form, k, env):
    _expect_args(form, 2)

    def finish(vs):
        keys, value = vs[:-1], vs[-1]
        bindings = []
        if not _trivial(value):
            name = env.fresh("V")
            bindings = [name, value]
            value = name
        new_state = List((B_STORE, STATE, List((B_VECTOR,) + tuple(keys)), value))
        return make_let(bindings, call_cont(k, value, new_state))
    return chain_args(form.items[1:], finish, env)


def _retrieve(form, k, env):
    _expect_args(form, 1)
    return chain_args(form.items[1:], lambda vs: call_cont(
        k, List((B_RETRIEVE, STATE, List((B_VECTOR,) + tuple(vs))))), env)


def _opaque_only(form, k, env):
    # quote and fn are always opaque; reaching here means a malformed use
    return call_cont(k, opaque_cps(form, env))


_SPECIAL = {
    "if": _if, "if-not": _if_not, "when": _when, "when-not": _when_not, "cond": _cond,
    "case": _case, "and": _and, "or": _or, "do": _do, "let": _let, "loop": _loop,
    "recur": _recur, "mem": _mem, "apply": _apply, "sample": _sample, "observe": _observe,
    "store": _store, "retrieve": _retrieve, "quote": _opaque_only, "fn": _opaque_only,
    "fm": _opaque_only, "fn-recur": _opaque_only,
}


def cps_of_expression(form, cont, env):
    """Public entry point: CPS of ``form`` passing its value to ``cont``."""
    return cps_of(form, cont, env)
