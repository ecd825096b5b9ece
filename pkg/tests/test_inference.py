import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from anglican.checkpoints import ObserveCP, ResultCP, SampleCP, continue_
from anglican.compiler import compile_query, load_program
from anglican.forms import Keyword, Symbol
from anglican.inference import (Address, AddressCursor, InferenceError, QueryRuntimeError,
                                addresses, checkpoint_id, default_handler, doquery, exec_query,
                                infer, lmh_step, next_address, smc_run)
from anglican.inference.lmh import log_acceptance
from anglican.runtime import Bernoulli, Normal, Rng, initial_state
from anglican.stat import log_sum_exp

from helpers import run_state

S = Symbol


def _table(text):
    return [Address(S(a), int(b)) for a, b in
            (part.strip("[]").split() for part in text.split("]["))]


# -- addressing ------------------------------------------------------------------------

def test_first_address_table():
    got = addresses([S(x) for x in "C1 C2 C2 C1 C1 C1 C2 C3".split()])
    assert got == _table("[C1 0][C2 0][C2 1][C1 16][C1 17][C1 18][C2 16][C3 0]")


def test_second_address_table():
    got = addresses([S(x) for x in "C1 C2 C1 C1 C2 C2 C3".split()])
    assert got == _table("[C1 0][C2 0][C1 16][C1 17][C2 16][C2 17][C3 0]")


def test_uninterrupted_run_is_unpadded():
    assert [a.index for a in addresses(["x"] * 15)] == list(range(15))


def test_padding_option():
    assert [a.index for a in addresses("abab", padding=4)] == [0, 0, 4, 4]
    with pytest.raises(ValueError):
        AddressCursor(0)


def test_next_address_updates_cursor():
    cursor = AddressCursor()
    a, c = next_address(cursor, "x")
    assert a == Address("x", 0) and c is cursor
    assert next_address(cursor, "x")[0] == Address("x", 1)
    copy = cursor.copy()
    next_address(copy, "y")
    assert cursor.last_id == "x" and copy.last_id == "y"


def _runs_addresses(runs, padding=16):
    seq = [ident for ident, n in runs for _ in range(n)]
    out, i = [], 0
    addrs = addresses(seq, padding)
    for ident, n in runs:
        out.append(addrs[i:i + n])
        i += n
    return out


runs_strategy = st.lists(st.tuples(st.sampled_from("abcd"), st.integers(1, 15)),
                         min_size=1, max_size=12).map(
    lambda rs: [r for i, r in enumerate(rs) if i == 0 or r[0] != rs[i - 1][0]])


@settings(max_examples=200, deadline=None)
@given(runs_strategy, st.data())
def test_changing_a_run_length_only_moves_that_run(runs, data):
    i = data.draw(st.integers(0, len(runs) - 1))
    n = data.draw(st.integers(1, 15))
    changed = list(runs)
    changed[i] = (runs[i][0], n)
    before, after = _runs_addresses(runs), _runs_addresses(changed)
    for j, (b, a) in enumerate(zip(before, after)):
        if j != i:
            assert a == b
    assert after[i][0] == before[i][0]


@settings(max_examples=200, deadline=None)
@given(runs_strategy, st.data())
def test_inserting_a_new_run_leaves_others_alone(runs, data):
    i = data.draw(st.integers(0, len(runs)))
    n = data.draw(st.integers(1, 15))
    inserted = runs[:i] + [("new", n)] + runs[i:]
    before = _runs_addresses(runs)
    after = _runs_addresses(inserted)
    assert after[:i] + after[i + 1:] == before
    assert [a.index for a in after[i]] == list(range(n))


def test_checkpoint_id_uses_explicit_identifier():
    seen = []

    def handler(cp, rng):
        seen.append(checkpoint_id(cp, cursor)[0])
        return default_handler(cp, rng)
    cursor = AddressCursor()
    exec_query(handler, compile_query("(sample 'C1 (flip 0.5))"), None, initial_state, Rng(0))
    assert seen == [Address(S("C1"), 0)]


def _address_trace(q, seed):
    cursor = AddressCursor()
    seen = []

    def handler(cp, rng):
        seen.append(cursor.next(cp.id))
        return default_handler(cp, rng)
    exec_query(handler, q, None, initial_state, Rng(seed))
    return seen


def test_generated_identifiers_are_stable_and_distinct():
    q = compile_query("""
      (let [n (sample (uniform-discrete 1 5))]
        (loop [i 0] (when (< i n) (sample (flip 0.5)) (observe (normal 0 1) i) (recur (inc i))))
        (sample (flip 0.5)))""")
    a, b = _address_trace(q, 3), _address_trace(q, 3)
    assert a == b
    ids = [x[0] for x in a]
    assert ids[0] != ids[1] and ids[0] != ids[-1] and ids[1] != ids[-1]
    assert all(i.__class__ is Symbol for i in ids)


# -- exec and the default handler --------------------------------------------------------------

def test_exec_constant_program():
    state = run_state("1")
    assert state.result == 1 and state.log_weight == 0.0


def test_exec_observe_flip():
    state = run_state("(observe (flip 0.5) true)")
    assert state.log_weight == pytest.approx(math.log(0.5))


def test_two_observes_add():
    state = run_state("(observe (normal 0 1) 1) (observe (bernoulli 0.3) 0)")
    expected = Normal(0, 1).observe(1) + math.log(0.7)
    assert state.log_weight == pytest.approx(expected, abs=1e-12)


def test_default_handler_sample_and_observe():
    got = []
    cp = SampleCP(S("s"), Bernoulli(1.0), lambda v, s: got.append(v) or ResultCP(s), initial_state)
    default_handler(cp, Rng(0))()
    assert got == [1]
    cp = ObserveCP(S("o"), Normal(0, 1), 0, lambda v, s: ResultCP(s.set_result(v)), initial_state)
    final = default_handler(cp, Rng(0))()
    assert final.state.result is None
    assert final.state.log_weight == pytest.approx(-0.918939, abs=1e-6)


def test_deli_query_result_shape():
    with open("programs/deli.anglican") as f:
        q = load_program(f.read(), "deli.anglican").query()
    state = exec_query(default_handler, q, None, initial_state, Rng(1))
    assert set(state.result) == {Keyword("same-customer"), Keyword("times-to-arrive")}


# -- infer -----------------------------------------------------------------------------------

def test_importance_flip_frequency():
    q = compile_query("(sample (flip 0.5))")
    states = itertools.islice(infer("importance", q, None, seed=1), 100_000)
    assert abs(sum(s.result for s in states) / 100_000 - 0.5) < 0.01


def test_infer_is_lazy():
    calls = []
    program = load_program("(defquery q (probe))", host={"probe": lambda: calls.append(1)},
                           extra_primitives={"probe"})
    q = program.query()
    for algorithm in ("importance", "lmh", "smc"):
        seq = infer(algorithm, q)
        assert calls == []
        next(seq)
        assert len(calls) >= 1
        calls.clear()


def test_infer_destructures_value():
    q = compile_query("""(defquery my-query [mean sd]
                           (let [x (sample (normal mean sd))] (observe (normal x 1) 2) x))""")
    states = list(itertools.islice(infer("lmh", q, (1.0, 3.0), seed=0), 50))
    assert all(isinstance(s.result, float) for s in states)


@pytest.mark.parametrize("args, kw, fragment", [
    (("gibbs",), {}, "unknown algorithm"),
    (("lmh",), {"particles": 3}, "smc only"),
    (("smc",), {"particles": 0}, "particles"),
    (("smc",), {"particles": 2.5}, "particles"),
    (("lmh",), {"padding": 0}, "padding"),
    (("lmh",), {"seed": "x"}, "seed"),
    (("lmh",), {"burn": 3}, "unknown option"),
])
def test_infer_option_errors(args, kw, fragment):
    with pytest.raises(InferenceError) as info:
        infer(args[0], compile_query("1"), None, **kw)
    assert fragment in str(info.value)


def test_doquery_keyword_pairs():
    q = compile_query("(sample (flip 0.5))")
    a = [s.result for s in itertools.islice(doquery(Keyword("smc"), q, None, ":particles", 4, ":seed", 2), 8)]
    b = [s.result for s in itertools.islice(infer("smc", q, None, particles=4, seed=2), 8)]
    assert a == b
    with pytest.raises(InferenceError):
        doquery("smc", q, None, ":particles")


def test_same_seed_same_sequence():
    q = compile_query("(let [x (sample (normal 0 1))] (observe (normal x 1) 1) x)")
    for algorithm in ("importance", "lmh", "smc"):
        opts = {"seed": 9, **({"particles": 5} if algorithm == "smc" else {})}
        a = [(s.result, s.log_weight) for s in itertools.islice(infer(algorithm, q, **opts), 20)]
        b = [(s.result, s.log_weight) for s in itertools.islice(infer(algorithm, q, **opts), 20)]
        assert a == b


# -- LMH --------------------------------------------------------------------------------------

def test_lmh_prior_chain():
    q = compile_query("(sample (normal 3 1))")
    xs = [s.result for s in itertools.islice(infer("lmh", q, seed=4), 20_000)]
    # samples are correlated only through rejections; none happen without observes
    assert abs(sum(xs) / len(xs) - 3.0) < 5 / math.sqrt(len(xs))


def test_lmh_outputs_unit_weight_and_extras():
    q = compile_query("(let [x (sample (normal 0 1))] (observe (normal x 1) 2) x)")
    for s in itertools.islice(infer("lmh", q, seed=0), 100):
        assert s.log_weight == 0.0
        assert s.extras["lmh-accepted"] in (True, False)
        assert s.extras["lmh-log-weight"] < 0


def test_lmh_trace_entries_are_consistent():
    q = compile_query("(let [n (sample (uniform-discrete 1 4))] (repeatedly n (fn [] (sample (gamma 2 1)))))")
    rng = Rng(2)
    db, state = {}, None
    for _ in range(200):
        db, state, _ = lmh_step(db, state, q, None, rng)
        assert len(db) == 1 + len(state.result)
        for entry in db.values():
            assert entry.log_prob == entry.dist.observe(entry.value)


def test_lmh_redraws_values_outside_new_support():
    q = compile_query("""
      (let [wide (sample 'w (flip 0.5))
            x (sample 'x (if wide (uniform-continuous 0 10) (uniform-continuous 0 1)))]
        [wide x])""")
    rng = Rng(0)
    db, state = {}, None
    redraws = 0
    for _ in range(2000):
        prev = state
        db, state, accepted = lmh_step(db, state, q, None, rng)
        wide, x = state.result
        assert 0 <= x < (10 if wide else 1)
        if prev is not None and accepted and prev.result[0] and not wide and prev.result[1] >= 1:
            redraws += 1
    assert redraws > 0


def test_lmh_without_samples_repeats():
    q = compile_query("(observe (normal 0 1) 1) 7")
    states = list(itertools.islice(infer("lmh", q, seed=1), 5))
    assert [s.result for s in states] == [7] * 5
    assert all(s.extras["lmh-log-weight"] == states[0].extras["lmh-log-weight"] for s in states)


def test_log_acceptance():
    assert log_acceptance(-1.0, -2.0, 3, 2, 0.5) == pytest.approx(-1.0 + 0.5 + math.log(3 / 2))
    assert log_acceptance(-1.0, -math.inf, 1, 1, 0.0) == -math.inf
    assert log_acceptance(-math.inf, -1.0, 1, 1, 0.0) == math.inf
    assert log_acceptance(-1.0, -1.0, 1, 0, 0.0) == -math.inf


def test_lmh_runtime_error_carries_address():
    q = compile_query("(let [x (sample 'a (flip 0.5))] (when x (nth [] 2)) x)")
    with pytest.raises(QueryRuntimeError) as info:
        list(itertools.islice(infer("lmh", q, seed=0), 50))
    assert info.value.address == (S("a"), 0)


# -- SMC ------------------------------------------------------------------------------------

MODEL = "(let [x (sample (normal 0 1))] (observe (normal x 1) 2) x)"


def test_smc_single_particle_is_importance():
    q = compile_query(MODEL)
    for seed in range(5):
        a = next(infer("smc", q, seed=seed, particles=1))
        b = next(infer("importance", q, seed=seed))
        assert a.result == b.result and a.log_weight == b.log_weight


def test_resampling_preserves_total_weight():
    q = compile_query(MODEL)
    n = 50
    states = smc_run(q, None, n, Rng(3))
    is_rng = Rng(3)
    before = [exec_query(default_handler, q, None, initial_state, is_rng.split()).log_weight
              for _ in range(n)]
    mean_before = sum(math.exp(lw) for lw in before) / n
    mean_after = sum(math.exp(s.log_weight) for s in states) / n
    assert abs(mean_before - mean_after) < 1e-12
    assert states[0].extras["log-marginal"] == pytest.approx(log_sum_exp(before) - math.log(n), abs=1e-12)


def _normal_logpdf(x, mean, var):
    return -0.5 * (x - mean) ** 2 / var - 0.5 * math.log(2 * math.pi * var)


def test_smc_evidence_is_unbiased():
    q = compile_query("""(let [x (sample (normal 0 1))]
                           (observe (normal x 1) 2)
                           (observe (normal x 1) 1)
                           x)""")
    # y1 ~ N(0, 2); given y1 = 2 the posterior is N(1, 1/2), so y2 ~ N(1, 3/2)
    evidence = math.exp(_normal_logpdf(2, 0, 2) + _normal_logpdf(1, 1, 1.5))
    rng = Rng(77)
    zs = [math.exp(smc_run(q, None, 50, rng.split())[0].extras["log-marginal"]) for _ in range(200)]
    mean = sum(zs) / len(zs)
    se = math.sqrt(sum((z - mean) ** 2 for z in zs) / (len(zs) - 1) / len(zs))
    assert abs(mean - evidence) < 3 * se


def test_smc_observe_count_mismatch_names_address():
    q = compile_query("(when (sample (flip 0.5)) (observe 'obs (normal 0 1) 0)) 1")
    with pytest.raises(InferenceError) as info:
        smc_run(q, None, 50, Rng(0))
    assert "[obs 0]" in str(info.value)


def test_smc_zero_particles():
    with pytest.raises(InferenceError):
        smc_run(compile_query("1"), None, 0, Rng(0))


def test_smc_all_weights_zero():
    q = compile_query("(observe (flip 1.0) false)")
    with pytest.raises(InferenceError):
        smc_run(q, None, 10, Rng(0))


def test_smc_epochs_carry_particle_count():
    q = compile_query(MODEL)
    states = list(itertools.islice(infer("smc", q, seed=0, particles=7), 21))
    marginals = [s.extras["log-marginal"] for s in states]
    assert len(set(marginals[:7])) == 1 and len(set(marginals[7:14])) == 1
    assert marginals[0] != marginals[7]


def test_smc_runtime_error_carries_source():
    q = compile_query("(let [x (sample 'a (flip 0.5))] (observe (normal 0 1) 0) (when x (nth [] 2)) x)",
                      source_name="model.anglican")
    with pytest.raises(QueryRuntimeError) as info:
        smc_run(q, None, 20, Rng(0))
    assert "model.anglican" in str(info.value)
