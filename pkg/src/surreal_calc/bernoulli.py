"""Bernoulli numbers and polynomials over exact rationals."""

from __future__ import annotations

import functools
from fractions import Fraction
from math import comb

import sympy as sp


@functools.lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the B_1 = -1/2 convention, via sum_{j<=n} C(n+1, j) B_j = 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(1)
    total = sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n))
    return -total / (n + 1)


def bernoulli_poly_coeffs(n: int) -> list[Fraction]:
    """Coefficients c_j of B_n(x) = sum_j c_j x^j, lowest degree first."""
    return [comb(n, j) * bernoulli_number(n - j) for j in range(n + 1)]


def bernoulli_poly(n: int, x) -> sp.Expr:
    x = sp.sympify(x)
    return sp.Add(*[sp.Rational(c.numerator, c.denominator) * x**j
                    for j, c in enumerate(bernoulli_poly_coeffs(n))])


def zeta_nonpositive(p: int) -> Fraction:
    """zeta(-p) for integer p >= 0, as -B_{p+1}(1)/(p+1)."""
    b = bernoulli_number(p + 1)
    if p == 0:
        b = -b
    return -b / (p + 1)


def power_sum_poly(p: int, x) -> sp.Expr:
    """sum_{k=0}^{x-1} k^p as a polynomial in x (Faulhaber)."""
    x = sp.sympify(x)
    b0 = bernoulli_number(p + 1)
    return sp.expand((bernoulli_poly(p + 1, x) - sp.Rational(b0.numerator, b0.denominator)) / (p + 1))
