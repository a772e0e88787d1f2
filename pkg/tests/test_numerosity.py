import pytest
import sympy as sp

from surreal_calc.asymptotics import expand, refine, split
from surreal_calc.errors import NotSolvable, UnsupportedSequenceClass
from surreal_calc.expr import OMEGA, OMEGA1, equivalent, parse, var
from surreal_calc.numerosity import (N_INTEGERS, Inclusion, IntervalSpec, antidifference,
                                     count_oracle, detect, full_numerosity,
                                     interval_numerosity, parse_interval,
                                     sequence_from_numerosity)

k = var("k")


def N(text, order=2):
    return full_numerosity(detect(parse(text)), order)


def test_antidifference_of_k_squared():
    F = antidifference(detect(k**2))
    assert sp.expand(F - (k**3 / 3 - k**2 / 2 + k / 6)) == 0
    assert all(F.subs(k, n + 1) - F.subs(k, n) == n**2 for n in range(101))
    assert F.subs(k, 0) == 0


def test_antidifference_of_the_log_example():
    F = antidifference(detect(parse("(e-1)*e^k")))
    assert sp.simplify(F - (sp.exp(k) - 1)) == 0


@pytest.mark.parametrize("term, full, refined", [
    ("k+1", "w - 1/2", "w - 1/2"),
    ("2*k", "w/2 + 1/2", "w/2 + 1/2"),
    ("2*k+1", "w/2", "w/2"),
    ("a*k+b", "w/a + 1/2 - b/a", None),
    ("k^2", "sqrt(36*w+3)/6 + 1/2", "w^(1/2) + 1/2"),
    ("1/3+k+k^2", "sqrt(w)", "w^(1/2)"),
    ("k^4", "(1/30)*sqrt(30*sqrt(900*w+30)+225) + 1/2", "w^(1/4) + 1/2"),
    ("a^k", "ln((a-1)*w/ln(a))/ln(a)", None),
])
def test_full_and_refined(term, full, refined):
    res = N(term)
    assert res.exact
    assert equivalent(res.full, parse(full))
    if refined:
        assert str(res.refined) == refined
        assert refine(expand(res.full, 2)) == res.refined


def test_cubic_is_exact():
    res = N("k^3")
    assert res.exact
    # Cardano root must invert the derivative of the antidifference
    g = sp.diff(antidifference(detect(k**3)), k)
    assert sp.N((g.subs(k, res.full) - OMEGA).subs(OMEGA, 10**6), 30) == pytest.approx(0, abs=1e-20)


def test_fallback_is_marked_inexact():
    res = N("k^5")
    assert not res.exact
    assert str(res.refined) == "w^(1/5) + 1/2"


@pytest.mark.parametrize("bad", ["sin(k)", "-k", "w*k", "1/k", "7"])
def test_unsupported_classes(bad):
    with pytest.raises(UnsupportedSequenceClass):
        N(bad)


def test_count_oracle_examples():
    assert count_oracle(detect(k**2), 100) == 11
    assert count_oracle(detect(k + 1), 0) == 0
    assert count_oracle(detect(2**k), 1024) == 11


def test_count_oracle_matches_enumeration():
    for text in ["k^2", "3*k+7", "k^3 - 2*k + 5", "2^k + 3", "1/3+k+k^2"]:
        s = detect(parse(text))
        values = [s(n) for n in range(400)]
        for cutoff in [0, 1, 10, 57, 1000]:
            assert count_oracle(s, cutoff) == sum(1 for v in values if v <= cutoff)


def test_count_requires_bound_parameters():
    with pytest.raises(UnsupportedSequenceClass):
        count_oracle(detect(parse("a*k")), 10)


@pytest.mark.parametrize("modulus", [2, 3, 4, 5])
def test_residue_classes_add_up(modulus):
    total = sum((N(f"{modulus}*k+{r}").full for r in range(modulus)), sp.S.Zero)
    whole = N("k").full
    assert equivalent(whole, OMEGA + sp.S.Half)
    assert equivalent(total, whole)


def test_finite_part_constants():
    assert split(expand(N("k+1").full, 0)).finite == sp.Rational(-1, 2)
    assert equivalent(N("2*k+1").full - N("2*k+2").full, sp.S.Half)
    assert N_INTEGERS == 2 * OMEGA


@pytest.mark.parametrize("S, term", [
    ("ln(w)", "exp(k+1) - exp(k)"),
    ("w", "k + 1/2"),
    ("sqrt(w)", "1/3 + k + k^2"),
])
def test_sequence_from_numerosity(S, term):
    s = sequence_from_numerosity(parse(S))
    assert equivalent(s.body, parse(term))


@pytest.mark.parametrize("S", ["w", "sqrt(w)", "ln(w)", "w/a + 1/2 - b/a"])
def test_roundtrip(S):
    s = sequence_from_numerosity(parse(S))
    assert equivalent(full_numerosity(s).full, parse(S))


def test_unsolvable_numerosity():
    with pytest.raises(NotSolvable):
        sequence_from_numerosity(parse("w + ln(w)"))
    with pytest.raises(NotSolvable):
        sequence_from_numerosity(parse("3"))


@pytest.mark.parametrize("text, value", [
    ("[0,1)", OMEGA1),
    ("[0,1]", OMEGA1 + 1),
    ("(0,1)", OMEGA1 - 1),
    ("<0,1>", OMEGA1),
    ("[0,w)", OMEGA * OMEGA1),
    ("[0,inf)", OMEGA * OMEGA1),
    ("(-w,w)", 2 * OMEGA * OMEGA1 - 1),
    ("[2,2]", 1),
])
def test_intervals(text, value):
    assert sp.expand(interval_numerosity(parse_interval(text)) - value) == 0


def test_interval_validation():
    with pytest.raises(ValueError):
        IntervalSpec(sp.Integer(2), sp.Integer(1))
    with pytest.raises(ValueError):
        parse_interval("0,1")
    spec = parse_interval("<0,1]")
    assert spec.lo_inclusion is Inclusion.HALF and spec.hi_inclusion is Inclusion.INCLUDED


def test_refine_commutes_with_addition_on_the_corpus():
    terms = ["k+1", "2*k", "2*k+1", "k^2", "1/3+k+k^2", "k^4", "3*k+2"]
    values = [N(t).full for t in terms]
    for a in values:
        for b in values:
            lhs = refine(expand(a + b, 2)).to_expr()
            rhs = refine(expand(a, 2)).to_expr() + refine(expand(b, 2)).to_expr()
            assert equivalent(lhs, rhs)
