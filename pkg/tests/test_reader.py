import math

import pytest
from hypothesis import given, settings, strategies as st

from anglican.forms import (Keyword, List, MapForm, Quoted, SetForm, Symbol, Vector, print_form,
                            struct_key)
from anglican.reader import ReadError, read_forms, read_one


def test_cont_call():
    assert read_one("(cont 1 $state)") == List([Symbol("cont"), 1, Symbol("$state")])


def test_empty_input():
    assert read_forms("") == []
    assert read_forms("  ; only a comment\n ,, ") == []


def test_set_literal():
    assert read_one("#{0 1}") == SetForm([0, 1])


def test_quote_shorthand():
    assert read_one("'[1 2 3]") == Quoted(Vector([1, 2, 3]))


def test_multiple_forms_in_order():
    forms = read_forms("(def x 1) ; note\n[x :k \"s\"] {:a nil}")
    assert forms == [List([Symbol("def"), Symbol("x"), 1]),
                     Vector([Symbol("x"), Keyword("k"), "s"]),
                     MapForm([(Keyword("a"), None)])]


@pytest.mark.parametrize("text, value", [
    ("13.", 13.0), ("-3", -3), ("1.5e3", 1500.0), ("true", True), ("false", False),
    ("nil", None), ('"a\\nb"', "a\nb"), ("##Inf", math.inf), ("##-Inf", -math.inf),
])
def test_atoms(text, value):
    got = read_one(text)
    assert got == value and got.__class__ is value.__class__


def test_int_and_real_are_distinct():
    assert read_one("1").__class__ is int
    assert read_one("1.").__class__ is float
    assert read_one("#{1 1.0}") == SetForm([1, 1.0])


def test_symbols_and_keywords():
    assert read_one("&") == Symbol("&")
    assert read_one("Math/sqrt") == Symbol("Math/sqrt")
    assert read_one("Math/sqrt").namespace == "Math"
    assert read_one("::mem") == Keyword(":mem")
    assert read_one("+") == Symbol("+")
    assert read_one("-x") == Symbol("-x")


def test_destructuring_vector():
    assert read_one("[o & observations*]") == Vector(
        [Symbol("o"), Symbol("&"), Symbol("observations*")])


@pytest.mark.parametrize("text, fragment", [
    ("(+ 1", "unbalanced"),
    ("(]", "unbalanced"),
    (")", "unbalanced"),
    ("{:a 1 :a 2}", "duplicate map key"),
    ("#{1 1}", "duplicate set element"),
    ("{:a}", "map"),
    ("1abc", "invalid token"),
    ("\\a", "unsupported syntax"),
    ('#"re"', "unsupported syntax"),
    ("^:meta x", "unsupported syntax"),
    ("@x", "unsupported syntax"),
    ("1/2", "unsupported syntax"),
    ('"open', "string"),
])
def test_errors(text, fragment):
    with pytest.raises(ReadError) as info:
        read_forms(text)
    assert fragment in str(info.value)


def test_error_position():
    with pytest.raises(ReadError) as info:
        read_forms("(a\n  (b c]")
    assert info.value.line == 2 and info.value.col is not None


# -- round trip ---------------------------------------------------------------------

_name = st.from_regex(r"[a-z][a-z0-9\-?*!]{0,6}", fullmatch=True).filter(
    lambda s: s not in ("true", "false", "nil"))

atoms = st.one_of(
    st.integers(-10**12, 10**12),
    st.floats(allow_nan=True, allow_infinity=True),
    st.booleans(),
    st.none(),
    st.text(st.characters(min_codepoint=32, max_codepoint=0x2FF) | st.sampled_from("\n\t"),
            max_size=8),
    _name.map(Keyword),
    _name.map(Symbol),
)


def _unique(xs):
    return st.lists(xs, max_size=4, unique_by=struct_key)


forms = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.lists(inner, max_size=4).map(List),
        st.lists(inner, max_size=4).map(Vector),
        _unique(inner).map(SetForm),
        st.lists(st.tuples(inner, inner), max_size=3, unique_by=lambda kv: struct_key(kv[0])).map(MapForm),
        inner.map(Quoted),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(forms)
def test_print_read_round_trip(form):
    assert read_one(print_form(form)) == form


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=30))
def test_reader_is_total(text):
    try:
        read_forms(text)
    except ReadError:
        pass
