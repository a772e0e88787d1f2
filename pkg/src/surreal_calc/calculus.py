"""Derivation, the surreal delta, and integration of surreal values and functions."""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .antideriv import definite
from .asymptotics import expand, finite_part, improper_integral_to_surreal, split
from .errors import InvalidPower, NotPurelyInfinite, UnsupportedExpansion
from .expr import OMEGA, OMEGA1, canonicalize, d_omega1, dw_order, surreal_symbols, var

_BASIS_FUNCS = (sp.exp, sp.log, sp.loggamma, sp.gamma, sp.polygamma, sp.digamma)


def _check_basis(e: sp.Expr):
    for node in sp.preorder_traversal(e):
        if isinstance(node, sp.Function) and not isinstance(node, _BASIS_FUNCS):
            if surreal_symbols(node):
                raise UnsupportedExpansion(f"{node.func} of a surreal argument is outside the basis")


def derive(e) -> sp.Expr:
    """The derivation on surreal expressions: d/dw, with dW(n) -> dW(n+1) for W's derivatives."""
    e = sp.sympify(e)
    _check_basis(e)
    out = sp.diff(e, OMEGA)
    if e.has(OMEGA1):
        out += sp.diff(e, OMEGA1) * d_omega1(1)
    for sym in e.free_symbols:
        n = dw_order(sym)
        if n is not None:
            out += sp.diff(e, sym) * d_omega1(n + 1)
    return canonicalize(out)


def delta(x) -> sp.Expr:
    """w/pi at 0 and 0 elsewhere."""
    return OMEGA / sp.pi if sp.sympify(x) == 0 else sp.S.Zero


def delta_power(p) -> sp.Expr:
    """delta(0)^p, through the divergent integral (p/pi^p) * int_0^inf x^(p-1) dx."""
    p = sp.sympify(p)
    if not (p.is_Rational and p > 0):
        raise InvalidPower(f"delta can only be raised to a positive rational power, got {p}")
    x = var("x")
    return canonicalize(p / sp.pi**p * improper_integral_to_surreal(x ** (p - 1), 0, x))


def _purely_infinite(w: sp.Expr) -> bool:
    parts = split(expand(w, 1))
    return parts.finite == 0 and not parts.infinitesimal.terms and bool(parts.infinite.terms)


def integrate_constant_over_set(w, numerosity) -> sp.Expr:
    """Integral of a purely infinite constant over a set: pi * N(S) * derive(w)."""
    w = sp.sympify(w)
    if not _purely_infinite(w):
        raise NotPurelyInfinite(f"{w} has a finite or infinitesimal part")
    return canonicalize(sp.pi * sp.sympify(numerosity) * derive(w))


def numerosity_via_delta(numerosity) -> sp.Expr:
    """(1/pi) * integral of w over the set; reproduces N(S)."""
    return canonicalize(integrate_constant_over_set(OMEGA, numerosity) / sp.pi)


@dataclass(frozen=True)
class SurrealFunction:
    body: sp.Expr
    variable: sp.Symbol

    def __call__(self, t):
        return self.body.subs(self.variable, t)


def integrate_surreal_function(F: SurrealFunction, a, b) -> sp.Expr:
    """Integral of a surreal-valued function between surreal bounds.

    pi*W times the formal integral of derive(F), plus the Newton-Leibniz
    integral of the finite part of F.  Equal bounds give pi*derive(F(a)).
    """
    a, b = sp.sympify(a), sp.sympify(b)
    x = F.variable
    if canonicalize(a) == canonicalize(b):
        return canonicalize(sp.pi * derive(F(a)))
    formal = definite(derive(F.body), x, a, b)
    fin = finite_part(expand(F.body, 0))
    fin_int = definite(fin, x, a, b) if fin != 0 else sp.S.Zero
    return canonicalize(sp.pi * OMEGA1 * formal + fin_int)
