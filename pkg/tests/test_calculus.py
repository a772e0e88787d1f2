import random

import pytest
import sympy as sp

from surreal_calc.calculus import (SurrealFunction, delta, delta_power, derive,
                                   integrate_constant_over_set, integrate_surreal_function,
                                   numerosity_via_delta)
from surreal_calc.errors import InvalidPower, NotPurelyInfinite, UnsupportedExpansion
from surreal_calc.expr import OMEGA, OMEGA1, canonicalize, d_omega1, equivalent, parse, var
from surreal_calc.numerosity import interval_numerosity, parse_interval

from randexpr import basis_expression

x = var("x")


def test_derive_examples():
    assert equivalent(derive(parse("w^c")), parse("c*w^(c-1)"))
    assert derive(sp.Integer(7)) == 0
    assert equivalent(derive(parse("w^W")), parse("w^(W-1)*(w*dW*ln(w) + W)"))
    assert derive(OMEGA1) == d_omega1(1)
    assert derive(d_omega1(2)) == d_omega1(3)
    assert derive(sp.log(OMEGA)) == 1 / OMEGA


def test_derive_rejects_non_basis_functions():
    with pytest.raises(UnsupportedExpansion):
        derive(parse("sin(w)"))


@pytest.mark.parametrize("seed", range(25))
def test_leibniz_and_additivity(seed):
    r = random.Random(seed)
    a, b = basis_expression(r), basis_expression(r)
    assert equivalent(derive(a * b), derive(a) * b + a * derive(b))
    assert equivalent(derive(a + b), derive(a) + derive(b))


def test_delta():
    assert delta(0) == OMEGA / sp.pi
    assert delta(5) == 0
    assert delta(sp.Rational(-3, 2)) == 0
    # scaling the argument leaves the value unchanged
    assert all(delta(a * 0) == delta(0) for a in (2, sp.Rational(1, 3), -5))


def test_delta_powers():
    assert delta_power(1) == delta(0)
    assert equivalent(delta_power(2), OMEGA**2 / sp.pi**2)
    assert equivalent(delta_power(sp.Rational(1, 2)), sp.sqrt(OMEGA / sp.pi))
    for bad in (0, -1, sp.sqrt(2)):
        with pytest.raises(InvalidPower):
            delta_power(bad)


def test_constants_over_sets():
    w1 = interval_numerosity(parse_interval("[0,1)"))
    assert integrate_constant_over_set(OMEGA, w1) == sp.pi * OMEGA1
    whole_line = interval_numerosity(parse_interval("[0,w)"))
    assert integrate_constant_over_set(sp.log(OMEGA), whole_line) == sp.pi * OMEGA1
    assert integrate_constant_over_set(OMEGA, 1) == sp.pi
    with pytest.raises(NotPurelyInfinite):
        integrate_constant_over_set(OMEGA + 1, 1)
    with pytest.raises(NotPurelyInfinite):
        integrate_constant_over_set(sp.Integer(3), 1)


def test_both_omega1_formulas_agree():
    via_unit = numerosity_via_delta(interval_numerosity(parse_interval("[0,1)")))
    via_log = canonicalize(integrate_constant_over_set(
        sp.log(OMEGA), interval_numerosity(parse_interval("[0,w)"))) / sp.pi)
    assert via_unit == via_log == OMEGA1


@pytest.mark.parametrize("n", [OMEGA1, sp.Integer(1), OMEGA - sp.S.Half, 2 * OMEGA, OMEGA * OMEGA1 + 1])
def test_numerosity_via_delta_is_the_identity(n):
    assert numerosity_via_delta(n) == canonicalize(n)


def test_linearity_violation():
    # integral of w over a single point versus w times the integral of 1 over it
    point = SurrealFunction(OMEGA, x)
    assert integrate_surreal_function(point, 0, 0) == sp.pi
    assert integrate_constant_over_set(OMEGA, 1) == sp.pi
    assert OMEGA * integrate_surreal_function(SurrealFunction(sp.S.One, x), 0, 0) == 0


def test_unit_mass():
    assert canonicalize(sp.pi * 1 * derive(OMEGA / sp.pi)) == 1


@pytest.mark.parametrize("F, a, b, expected", [
    ("w^c", "0", "alpha", "pi*alpha*c*W*w^(c-1)"),
    ("w^x", "0", "alpha", "pi*((alpha*ln(w)-1)*w^alpha+1)*W/(w*ln(w)^2)"),
    ("e^w", "0", "alpha", "e^w*pi*alpha*W"),
    ("ln(w)", "0", "alpha", "pi*alpha*W/w"),
    ("W^w", "0", "alpha", "alpha*pi*W^w*(w*dW+W*ln(W))"),
    ("5", "0", "1", "5"),
    ("w + 3*x", "0", "2", "2*pi*W + 6"),
])
def test_integrate_surreal_function(F, a, b, expected):
    value = integrate_surreal_function(SurrealFunction(parse(F), x), parse(a), parse(b))
    assert equivalent(value, parse(expected))


def test_point_branch_uses_the_derivation():
    F = SurrealFunction(parse("w^x"), x)
    assert equivalent(integrate_surreal_function(F, 2, 2), sp.pi * 2 * OMEGA)
