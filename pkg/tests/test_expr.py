import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from surreal_calc.errors import DomainError, ParseError, PowError, UnboundSymbol
from surreal_calc.expr import (OMEGA, OMEGA1, canonicalize, d_omega1, default_precision,
                               equivalent, eval_numeric, from_json, parse, to_json, to_text,
                               var)


@pytest.mark.parametrize("text", [
    "w - 1/2",
    "sqrt(36*w+3)/6 + 1/2",
    "sqrt(30*sqrt(900*w+30)+225)/30 + 1/2",
    "w^(1/2) + 1/2",
    "pi*alpha*c*W*w^(c-1)",
    "w*ln(w) - w + (1/2)*ln(2*pi)",
    "ln((a-1)*w/ln(a))/ln(a)",
    "ln(w) + gamma",
    "lnGamma(w) - (1/2)*ln(2*pi) + 1/2",
    "W*w^(W-1) + dW*w^W*ln(w)",
])
def test_printed_form_is_a_fixed_point(text):
    assert to_text(parse(text)) == text


def test_grammar_details():
    assert parse("w**2") == OMEGA**2
    assert parse("0.25*w") == OMEGA / 4
    assert parse("-w + 1") == 1 - OMEGA
    assert parse("log(w)") == parse("ln(w)")
    assert parse("dW(3)") == d_omega1(3)
    assert parse("dW") == d_omega1(1)
    assert parse("W") == OMEGA1
    assert parse("2^3^2") == 2**9


def test_bindings_substitute_at_parse_time():
    assert parse("a*k+b", {"a": "3", "b": 7}) == 3 * var("k") + 7


def test_parse_error_reports_offset_and_expectations():
    with pytest.raises(ParseError) as info:
        parse("w + * 2")
    assert info.value.offset == 4
    assert "(" in info.value.expected


@pytest.mark.parametrize("bad", ["", "w +", "(w", "sqrt w", "dW(0)", "w $ 2"])
def test_malformed_inputs(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_zero_to_a_negative_power():
    with pytest.raises(PowError):
        parse("0^(-1)")


def test_ln_of_zero():
    with pytest.raises(DomainError):
        parse("ln(0)")


def test_eval_matches_an_independent_mpmath_computation():
    expr = parse("sqrt(36*w+3)/6 + 1/2")
    with mpmath.workdps(40):
        oracle = mpmath.sqrt(mpmath.mpf(36 * 10**6 + 3)) / 6 + mpmath.mpf(1) / 2
        got = eval_numeric(expr, {"w": 10**6}, 30)
        assert abs(got - oracle) < mpmath.mpf(10) ** -28
    # sqrt(w + 1/12) + 1/2, i.e. 1000.50004166..., not 1000.500025
    assert mpmath.nstr(got, 12) == "1000.50004167"


def test_eval_errors():
    with pytest.raises(UnboundSymbol):
        eval_numeric(parse("w + a"), {"w": 3})
    with pytest.raises(DomainError):
        eval_numeric(parse("ln(x)"), {"x": -1})


def test_precision_from_environment(monkeypatch):
    monkeypatch.setenv("SURREAL_CALC_PRECISION", "50")
    assert default_precision() == 50
    monkeypatch.delenv("SURREAL_CALC_PRECISION")
    assert default_precision() == 30


def test_equivalence():
    assert equivalent(parse("(w+1)^2"), parse("w^2 + 2*w + 1"))
    assert equivalent(parse("1/(1-p)"), parse("-1/(p-1)"))
    assert not equivalent(parse("w + 1/2"), parse("w - 1/2"))


# ---------------------------------------------------------------------------
# random expressions

_leaf = st.sampled_from(["w", "W", "a", "2", "1/3", "pi", "dW", "x"])


def _combine(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: f"({t[0]}+{t[1]})"),
        st.tuples(children, children).map(lambda t: f"({t[0]}*{t[1]})"),
        st.tuples(children, st.sampled_from(["2", "-1", "1/2", "w"])).map(lambda t: f"({t[0]})^{t[1]}"),
        children.map(lambda c: f"exp({c})"),
        children.map(lambda c: f"ln(1+{c}^2)"),
    )


expressions = st.recursive(_leaf, _combine, max_leaves=6)


@settings(max_examples=60, deadline=None)
@given(expressions)
def test_canonical_text_roundtrip(text):
    e = parse(text)
    again = parse(to_text(e))
    assert equivalent(e, again)
    assert canonicalize(again) == again


@settings(max_examples=60, deadline=None)
@given(expressions)
def test_json_roundtrip_and_schema(expr_validator, text):
    e = parse(text)
    doc = to_json(e)
    expr_validator.validate(doc)
    assert equivalent(from_json(doc), e)


def test_schema_rejects_unknown_kinds(expr_validator):
    assert not expr_validator.is_valid({"kind": "matrix"})
    assert not expr_validator.is_valid({"kind": "symbol", "name": "dOmega1"})
