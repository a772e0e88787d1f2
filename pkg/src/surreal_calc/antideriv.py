"""Formal antidifferentiation for x^n (ln x)^m E(x), E an exponential of an affine argument.

Every symbol other than the integration variable is held constant, surreal
symbols included; this is the "formal" integral of the surreal calculus.
"""

from __future__ import annotations

import sympy as sp

from .errors import NoAntiderivative
from .expr import canonicalize


def _linear_coeff(u: sp.Expr, x: sp.Symbol):
    """Return (slope, intercept) when u is affine in x, else None."""
    u = sp.expand(u, power_exp=False, log=False)
    slope = sp.diff(u, x)
    if slope.has(x):
        return None
    return slope, sp.expand(u - slope * x)


def _classify(term: sp.Expr, x: sp.Symbol):
    """Factor a product into (const, n, m, E, lam) with term = const*x^n*ln(x)^m*E."""
    const, n, m, expo, lam = sp.S.One, sp.S.Zero, 0, sp.S.One, sp.S.Zero
    for f in sp.Mul.make_args(term):
        if not f.has(x):
            const *= f
            continue
        if f == x:
            n += 1
            continue
        if isinstance(f, sp.log) and f.args[0] == x:
            m += 1
            continue
        if isinstance(f, sp.Pow):
            base, ex = f.args
            if base == x and not ex.has(x):
                n += ex
                continue
            if isinstance(base, sp.log) and base.args[0] == x and ex.is_Integer and ex > 0:
                m += int(ex)
                continue
            if not base.has(x):
                lin = _linear_coeff(ex, x)
                if lin is not None:
                    expo *= f
                    lam += lin[0] * (1 if base == sp.E else sp.log(base))
                    continue
        if isinstance(f, sp.exp):
            lin = _linear_coeff(f.args[0], x)
            if lin is not None:
                expo *= f
                lam += lin[0]
                continue
        raise NoAntiderivative(f"no antiderivative for factor {f} in {x}")
    return const, sp.sympify(n), m, expo, sp.sympify(lam)


def _power_log(n, m: int, x):
    """Antiderivative of x^n ln(x)^m."""
    if n == -1:
        return sp.log(x) ** (m + 1) / (m + 1)
    if m == 0:
        return x ** (n + 1) / (n + 1)
    if m == 1:
        return x ** (n + 1) * ((n + 1) * sp.log(x) - 1) / (n + 1) ** 2
    return x ** (n + 1) * sp.log(x) ** m / (n + 1) - sp.Rational(m) / (n + 1) * _power_log(n, m - 1, x)


def antiderivative(f: sp.Expr, x: sp.Symbol) -> sp.Expr:
    """Some G with dG/dx = f; raises NoAntiderivative outside the supported class."""
    f = sp.expand(sp.sympify(f), power_exp=False, power_base=False, log=False)
    total = sp.S.Zero
    for term in sp.Add.make_args(f):
        if not term.has(x):
            total += term * x
            continue
        const, n, m, expo, lam = _classify(term, x)
        if lam == 0:
            total += const * expo * _power_log(n, m, x)
            continue
        if m != 0 or not (n.is_Integer and n >= 0):
            raise NoAntiderivative(f"no antiderivative for {term} in {x}")
        n = int(n)
        acc = sp.S.Zero
        for j in range(n + 1):
            acc += (-1) ** j * sp.ff(n, j) * x ** (n - j) / lam ** (j + 1)
        total += const * expo * acc
    return canonicalize(total)


def _at(G: sp.Expr, x: sp.Symbol, point: sp.Expr) -> sp.Expr:
    v = G.subs(x, point)
    if v.has(sp.nan, sp.zoo, sp.oo, -sp.oo):
        v = sp.limit(G, x, point, "+")
        if v.has(sp.nan, sp.zoo, sp.oo, -sp.oo):
            raise NoAntiderivative(f"antiderivative is singular at {x} = {point}")
    return v


def definite(f: sp.Expr, x: sp.Symbol, a: sp.Expr, b: sp.Expr) -> sp.Expr:
    """Newton-Leibniz: G(b) - G(a)."""
    G = antiderivative(f, x)
    return canonicalize(_at(G, x, b) - _at(G, x, a))
