"""One test per acceptance criterion; conftest prints a PASS/FAIL line
for each after the run."""

import itertools
import math
import os
import subprocess
import sys
import time

import pytest

from anglican.compiler import CompileEnv, compile_query, cps_of_expression, load_program
from anglican.forms import Keyword, List, Symbol, Vector
from anglican.inference import addresses, default_handler, exec_query, infer
from anglican.reader import read_one
from anglican.runtime import (Bernoulli, Beta, BetaBernoulli, Flip, Gamma, Normal, Rng,
                              UniformContinuous, UniformDiscrete, absorb, categorical, discrete,
                              initial_state, produce)
from anglican import stat

from helpers import continuous_fit_z, count_nodes, count_subtree, discrete_fit_z, matches_golden, run

K = Keyword
HERE = os.path.dirname(os.path.abspath(__file__))
PROGRAMS = os.path.join(os.path.dirname(HERE), "programs")


def _load(name):
    with open(os.path.join(PROGRAMS, name)) as f:
        return load_program(f.read(), name)


def _ir(text, cont="cont", **env):
    return cps_of_expression(read_one(text), Symbol(cont), CompileEnv(**env))


def test_criterion_01_cps_golden_forms():
    start = time.perf_counter()
    assert matches_golden(_ir("1"), "(cont 1 $state)", [])
    assert matches_golden(_ir("[0 1 2]"), "(cont (vector 0 1 2) $state)", [])
    assert matches_golden(_ir("{:a 1}"), "(cont (hash-map :a 1) $state)", [])
    assert matches_golden(_ir("#{0 1}"), "(cont (set (list 0 1)) $state)", [])
    assert matches_golden(_ir("(fn [x y] (+ x y))").items[1],
                          "(fn [cont $state x y] (fn [] (cont (+ x y) $state)))", ["cont"])
    k = read_one("(fn [x] (* 2 x))")
    ir = cps_of_expression(read_one("(if c t f)"), k, CompileEnv(globals={"c", "t", "f"}))
    assert matches_golden(ir, "(let [cont (fn [x] (* 2 x))]"
                              " (if c (fn [] (cont t $state)) (fn [] (cont f $state))))", ["cont"])
    assert matches_golden(_ir("(mem foo)", globals={"foo"}).items[1], """
      (let [M (gensym "M")]
        (fn mem [C $state & P]
          (if (in-mem? $state M P)
            (fn [] (C (get-mem $state M P) $state))
            (apply foo (fn [V $state] (fn [] (C V (set-mem $state M P V)))) $state P))))""",
                          ["M", "mem", "C", "P", "V"])
    assert time.perf_counter() - start < 1


def test_criterion_02_address_tables():
    start = time.perf_counter()
    first = addresses([Symbol(s) for s in "C1 C2 C2 C1 C1 C1 C2 C3".split()], padding=16)
    assert [(a.identifier.name, a.index) for a in first] == [
        ("C1", 0), ("C2", 0), ("C2", 1), ("C1", 16), ("C1", 17), ("C1", 18), ("C2", 16), ("C3", 0)]
    second = addresses([Symbol(s) for s in "C1 C2 C1 C1 C2 C2 C3".split()], padding=16)
    assert [(a.identifier.name, a.index) for a in second] == [
        ("C1", 0), ("C2", 0), ("C1", 16), ("C1", 17), ("C2", 16), ("C2", 17), ("C3", 0)]
    assert time.perf_counter() - start < 1


def _deli_exact():
    # Same customer: (y1, y2) ~ N((10, 10), [[9+1, 9], [9, 9+1]]).
    # Different customers: y1, y2 independent N(10, 9+1).  Prior odds 2:1.
    d1, d2 = 13.0 - 10.0, 9.0 - 10.0
    det = 10.0 * 10.0 - 9.0 * 9.0
    log_same = -0.5 * (10 * d1 * d1 - 18 * d1 * d2 + 10 * d2 * d2) / det - 0.5 * math.log(det)
    log_diff = -0.5 * (d1 * d1 + d2 * d2) / 10.0 - math.log(10.0)
    return 1.0 / (1.0 + 0.5 * math.exp(log_diff - log_same))


def test_criterion_03_deli_lmh():
    start = time.perf_counter()
    exact = _deli_exact()
    assert abs(exact - 0.1161793751) < 1e-9
    q = _load("deli.anglican").query()
    samples = list(itertools.islice(infer("lmh", q, seed=7), 5000, 10_000))
    assert len(samples) == 5000
    p = stat.empirical_probability(samples, lambda r: r[K("same-customer")])
    print(f"deli: estimate {p:.4f}, exact {exact:.4f}")
    assert abs(p - exact) < 0.03
    assert time.perf_counter() - start < 30


NORMAL_NORMAL = "(let [x (sample (normal 0 1))] (observe (normal x 1) 2) x)"
POST_MEAN, POST_SD = 1.0, 1 / math.sqrt(2)


def _weighted_moments(pairs):
    m = stat.weighted_mean(pairs)
    sd = math.sqrt(stat.weighted_mean(pairs, lambda r: (r - m) ** 2))
    return m, sd


def test_criterion_04_conjugate_all_algorithms():
    start = time.perf_counter()
    q = compile_query(NORMAL_NORMAL)
    runs = {
        "importance": list(itertools.islice(infer("importance", q, seed=1), 100_000)),
        "lmh": list(itertools.islice(infer("lmh", q, seed=1), 2000, 22_000)),
        "smc": list(itertools.islice(infer("smc", q, seed=1, particles=10_000), 10_000)),
    }
    for name, states in runs.items():
        m, sd = _weighted_moments([(s.result, s.log_weight) for s in states])
        print(f"{name}: mean {m:.4f} sd {sd:.4f}")
        assert abs(m - POST_MEAN) < 0.05, name
        assert abs(sd - POST_SD) < 0.05, name
    assert time.perf_counter() - start < 60


def test_criterion_05_two_flip_lmh_enumeration():
    src = """(let [a (sample (flip 0.5))
                   b (sample (flip 0.3))]
               (observe (flip (if (and a b) 0.9 (if (or a b) 0.4 0.1))) true)
               [a b])"""
    prior = {True: 0.5, False: 0.5}, {True: 0.3, False: 0.7}
    like = {(True, True): 0.9, (True, False): 0.4, (False, True): 0.4, (False, False): 0.1}
    joint = {(a, b): prior[0][a] * prior[1][b] * like[a, b] for a in (True, False) for b in (True, False)}
    z = sum(joint.values())
    exact = {k: v / z for k, v in joint.items()}
    q = compile_query(src)
    n = 100_000
    counts = dict.fromkeys(exact, 0)
    for s in itertools.islice(infer("lmh", q, seed=3), n):
        counts[tuple(s.result)] += 1
    tv = 0.5 * sum(abs(counts[k] / n - exact[k]) for k in exact)
    print(f"two-flip total variation {tv:.4f}")
    assert tv < 0.02


def test_criterion_06_beta_bernoulli_update():
    p = BetaBernoulli(1, 1)
    for x in (1, 1, 0):
        p = absorb(p, x)
    assert p == BetaBernoulli(3, 2)
    assert produce(p) == Bernoulli(3 / 5)
    got = run("""(loop [p (beta-bernoulli 1 1) xs [1 1 0]]
                   (if (empty? xs) (produce p) (recur (absorb p (first xs)) (rest xs))))""")
    assert got == Bernoulli(3 / 5)


def _depth():
    f, n = sys._getframe(), 0
    while f is not None:
        n += 1
        f = f.f_back
    return n


def test_criterion_07_stack_safety():
    start = time.perf_counter()
    depths = []

    def probe(n):
        depths.append(_depth())
        return n

    program = load_program("""
      (defm count-down [n acc]
        (if (= n 0)
          acc
          (do (when (= 0 (mod n 100000)) (probe n))
              (count-down (- n 1) (+ acc 1)))))
      (defquery q (count-down 1000000 0))""", host={"probe": probe}, extra_primitives={"probe"})
    base = _depth()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(base + 100)
    try:
        state = exec_query(default_handler, program.query(), None, initial_state, Rng(0))
    finally:
        sys.setrecursionlimit(limit)
    assert state.result == 1_000_000
    assert len(depths) == 10
    assert max(depths) - base < 40 and max(depths) == min(depths)
    assert time.perf_counter() - start < 10


@pytest.mark.parametrize("size", [1, 8, 64, 256])
def test_criterion_08_no_explosion(size):
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20 * size + 1000))
    try:
        body = Symbol("r")
        for i in range(size):
            body = List([Symbol("+"), body, i])
        k = List([Symbol("fn"), Vector([Symbol("r")]), body])
        env = CompileEnv(globals={"a", "b", "x", "y", "z"})
        ir = cps_of_expression(read_one("(if a x (if b y z))"), k, env)
        assert count_subtree(ir, body) == 1
        assert count_nodes(ir) <= count_nodes(body) + 40
    finally:
        sys.setrecursionlimit(limit)


def test_criterion_09_memoization():
    q = _load("eye_color.anglican").query()
    repeated = load_program("""
      (defquery repeated
        (let [eye-color (mem (fn [person] (sample (categorical ['brown 0.5] ['green 0.5]))))]
          [(eye-color 'bill) (eye-color 'john) (eye-color 'bill) (eye-color 'john) (eye-color 'bill)]))
    """).query()
    rng = Rng(2025)
    brown = 0
    n = 1000
    for _ in range(n):
        a, b, c, d, e = exec_query(default_handler, repeated, None, initial_state, rng.split()).result
        assert a == c == e and b == d
        result = exec_query(default_handler, q, None, initial_state, rng.split()).result
        brown += result == Symbol("brown")
    print(f"eye-color brown frequency {brown / n:.3f}")
    assert abs(brown / n - 0.5) < 0.05


DISCRETE = [Flip(0.3), Bernoulli(0.8), UniformDiscrete(0, 3), discrete((1, 2, 3, 0, 4)),
            categorical(((K("a"), 1), (K("b"), 3)))]
CONTINUOUS = [(Normal(1.5, 2.0), -8.5, 11.5), (Gamma(2.0, 2.0), 0.0, 5.0),
              (Beta(2.0, 5.0), 0.0, 1.0), (UniformContinuous(-1.0, 2.0), -1.0, 2.0)]


def test_criterion_10_distribution_suite():
    for d in DISCRETE:
        total = math.fsum(math.exp(d.observe(v)) for v in d.support())
        assert abs(total - 1) < 1e-9, d
        z = discrete_fit_z(d, 100_000, seed=10)
        assert abs(z) < 5, (d, z)
    for d, lo, hi in CONTINUOUS:
        z = continuous_fit_z(d, 100_000, 10, lo, hi)
        assert abs(z) < 5, (d, z)


def test_criterion_11_cli_determinism(tmp_path):
    argv = [sys.executable, "-m", "anglican", "run", os.path.join(PROGRAMS, "deli.anglican"),
            "--algorithm", "lmh", "--samples", "500", "--burn", "100", "--seed", "7"]
    outputs = []
    for i in range(2):
        path = tmp_path / f"out{i}.jsonl"
        with open(path, "wb") as f:
            proc = subprocess.run(argv, stdout=f, stderr=subprocess.PIPE)
        assert proc.returncode == 0, proc.stderr
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0].count(b"\n") == 501
