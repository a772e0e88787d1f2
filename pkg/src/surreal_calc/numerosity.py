"""Numerosities of closed-form sequences and of intervals.

The numerosity of a sequence a_k is the inverse of the derivative of its
antidifference, evaluated at w.  Degree <= 4 polynomials whose inverse is a
radical and geometric sequences are inverted exactly; everything else falls
back to the asymptotic inverse.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .antideriv import antiderivative
from .asymptotics import DEFAULT_ORDER, NormalForm, asymptotic_inverse, expand, refine
from .bernoulli import power_sum_poly
from .errors import DomainError, NotSolvable, UnsupportedSequenceClass
from .expr import OMEGA, OMEGA1, _flat_expand, canonicalize, eval_numeric, surreal_symbols, var
from .series_engine import sign_of

K = var("k")

N_INTEGERS = 2 * OMEGA


@dataclass(frozen=True)
class SequenceTerm:
    """A sequence a_k given by a closed form in ``k``.

    ``kind`` is ``"polynomial"``, ``"geometric"`` or ``"unsupported"``.  For
    polynomials ``coeffs`` lists the coefficients by ascending degree; for
    geometric terms c*a^k + d it is ``(c, a, d)``.
    """

    body: sp.Expr
    kind: str
    coeffs: tuple = ()
    start: int = 0

    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.kind == "polynomial" else None

    def __call__(self, k):
        return self.body.subs(K, k)


def _geometric_parts(body: sp.Expr):
    expanded = sp.expand(body, power_exp=True, power_base=False, log=False, mul=True)
    base = None
    c = sp.S.Zero
    d = sp.S.Zero
    for term in sp.Add.make_args(expanded):
        if not term.has(K):
            d += term
            continue
        coeff, rest = sp.S.One, sp.S.One
        for f in sp.Mul.make_args(term):
            if f.has(K):
                rest *= f
            else:
                coeff *= f
        if isinstance(rest, sp.exp):
            slope = sp.diff(rest.args[0], K)
            if slope.has(K) or sp.expand(rest.args[0] - slope * K) != 0:
                return None
            b = sp.exp(slope)
        elif isinstance(rest, sp.Pow) and not rest.base.has(K) and rest.exp == K:
            b = rest.base
        elif isinstance(rest, sp.Pow) and not rest.base.has(K):
            slope = sp.diff(rest.exp, K)
            if slope.has(K) or sp.expand(rest.exp - slope * K) != 0:
                return None
            b = rest.base**slope
        else:
            return None
        if base is not None and b != base:
            return None
        base = b
        c += coeff
    if base is None:
        return None
    return sp.simplify(c), base, d


def detect(body) -> SequenceTerm:
    """Classify a closed-form sequence term."""
    body = sp.sympify(body)
    if isinstance(body, str):
        raise TypeError("parse the body first")
    if surreal_symbols(body) or not body.has(K):
        return SequenceTerm(body, "unsupported")
    try:
        poly = sp.Poly(body, K)
    except sp.PolynomialError:
        poly = None
    if poly is not None and all(not c.has(K) for c in poly.all_coeffs()):
        coeffs = tuple(reversed(poly.all_coeffs()))
        if len(coeffs) >= 2 and sign_of(coeffs[-1]) != -1:
            return SequenceTerm(body, "polynomial", coeffs)
        return SequenceTerm(body, "unsupported")
    geo = _geometric_parts(body)
    if geo is not None:
        c, a, d = geo
        if sign_of(c) != -1 and sign_of(a - 1) != -1 and a != 1:
            return SequenceTerm(body, "geometric", (c, a, d))
    return SequenceTerm(body, "unsupported")


def _require(s: SequenceTerm) -> SequenceTerm:
    if isinstance(s, SequenceTerm):
        if s.kind == "unsupported":
            raise UnsupportedSequenceClass(f"unsupported sequence class: {s.body}")
        return s
    return _require(detect(s))


def antidifference(s) -> sp.Expr:
    """F with F(k+1) - F(k) = a_k and F(0) = 0."""
    s = _require(s)
    if s.kind == "polynomial":
        out = sum((c * power_sum_poly(p, K) for p, c in enumerate(s.coeffs)), sp.S.Zero)
        return canonicalize(sp.expand(out))
    c, a, d = s.coeffs
    return canonicalize(c * (a**K - 1) / (a - 1) + d * K)


@dataclass(frozen=True)
class NumerosityResult:
    full: sp.Expr
    refined: NormalForm
    exact: bool


def _shifted_coeffs(g: sp.Expr):
    """Coefficients of g(1/2 + y) in y, ascending."""
    y = sp.Dummy("y")
    poly = sp.Poly(sp.expand(g.subs(K, sp.S.Half + y)), y)
    return list(reversed(poly.all_coeffs()))


def _quadratic_root(a2, a1, a0):
    return (-a1 + sp.sqrt(a1**2 - 4 * a2 * (a0 - OMEGA))) / (2 * a2)


def _exact_polynomial_inverse(g: sp.Expr):
    deg = sp.degree(g, K)
    coeffs = list(reversed(sp.Poly(g, K).all_coeffs()))
    if deg == 1:
        return _flat_expand((OMEGA - coeffs[0]) / coeffs[1])
    if deg == 2:
        return _quadratic_root(coeffs[2], coeffs[1], coeffs[0])
    ys = _shifted_coeffs(g)
    if deg == 3 and ys[2] == 0:
        a3, a1, a0 = ys[3], ys[1], ys[0]
        p = a1 / a3
        sg = sign_of(p)
        if sg is None:
            return None
        u = (OMEGA - a0) / (2 * a3)
        if sg == 0:
            y = sp.cbrt(2 * u)
        else:
            v = sp.sqrt(u**2 + p**3 / 27)
            y = sp.cbrt(u + v) - sp.cbrt(v - u) if sg > 0 else sp.cbrt(u + v) + sp.cbrt(u - v)
        return sp.S.Half + y
    if deg == 4 and ys[3] == 0 and ys[1] == 0:
        y2 = _quadratic_root(ys[4], ys[2], ys[0])
        return sp.S.Half + sp.sqrt(y2)
    return None


def full_numerosity(s, order: int = DEFAULT_ORDER) -> NumerosityResult:
    """Numerosity of {a_k : k >= 0} as an expression in w."""
    s = _require(s)
    g = sp.expand(sp.diff(antidifference(s), K))
    full = None
    if s.kind == "polynomial":
        full = _exact_polynomial_inverse(g)
    else:
        c, a, d = s.coeffs
        target = OMEGA - d if d != 0 else OMEGA
        arg = (a - 1) * target / sp.log(a)
        if c != 1:
            arg = arg / c
        full = sp.log(arg) / sp.log(a)
    exact = full is not None
    if not exact:
        full = asymptotic_inverse(g, order, K)
    full = canonicalize(full)
    return NumerosityResult(full, refine(expand(full, order)), exact)


def count_elements(s, cutoff) -> int:
    """Count k >= start with a_k <= cutoff by a monotone bound plus a boundary scan."""
    s = _require(s)
    x = sp.Rational(Fraction(cutoff)) if not isinstance(cutoff, sp.Basic) else cutoff
    if s.body.free_symbols - {K}:
        raise UnsupportedSequenceClass("bind every parameter before counting")

    def le(k: int) -> bool:
        v = s.body.subs(K, k)
        if v.is_Rational:
            return v <= x
        return bool(sp.N(v - x, 60) <= 0)

    k_inc = s.start
    if s.kind == "polynomial":
        diff = sp.Poly(sp.expand(s.body.subs(K, K + 1) - s.body), K)
        roots = [r for r in sp.Poly(diff).nroots(n=30) if abs(sp.im(r)) < 1e-20] if diff.degree() > 0 else []
        if roots:
            k_inc = max(k_inc, math.floor(max(sp.re(r) for r in roots)) + 1)
    count = sum(1 for k in range(s.start, k_inc) if le(k))
    if not le(k_inc):
        return count
    lo, hi = k_inc, k_inc + 1
    while le(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if le(mid):
            lo = mid
        else:
            hi = mid
    return count + lo - k_inc + 1


count_oracle = count_elements


# ---------------------------------------------------------------------------
# from a numerosity back to a sequence


def _solve_for_omega(expr: sp.Expr, rhs: sp.Expr) -> sp.Expr:
    if expr == OMEGA:
        return rhs
    if isinstance(expr, (sp.Add, sp.Mul)):
        inner = [a for a in expr.args if a.has(OMEGA)]
        rest = [a for a in expr.args if not a.has(OMEGA)]
        if len(inner) != 1:
            raise NotSolvable(f"w occurs in several places of {expr}")
        if isinstance(expr, sp.Add):
            return _solve_for_omega(inner[0], rhs - sp.Add(*rest))
        return _solve_for_omega(inner[0], rhs / sp.Mul(*rest))
    if isinstance(expr, sp.Pow) and not expr.exp.has(OMEGA):
        return _solve_for_omega(expr.base, rhs ** (1 / expr.exp))
    if isinstance(expr, sp.log):
        return _solve_for_omega(expr.args[0], sp.exp(rhs))
    if isinstance(expr, sp.exp):
        return _solve_for_omega(expr.args[0], sp.log(rhs))
    raise NotSolvable(f"cannot solve {expr} = k for w")


def _first_valid_index(body: sp.Expr, limit: int = 10_000) -> int:
    if body.free_symbols - {K}:
        return 0
    for k in range(limit):
        try:
            v = eval_numeric(body, {"k": k}, 30)
        except DomainError:
            continue
        if v >= 0:
            return k
    raise NotSolvable(f"no real non-negative term among the first {limit}")


def sequence_from_numerosity(S) -> SequenceTerm:
    """A sequence whose numerosity is ``S`` (integration constant fixed to 0)."""
    S = sp.sympify(S)
    if not S.has(OMEGA) or S.has(OMEGA1):
        raise NotSolvable("numerosity must be an expression in w")
    h = sp.expand(_solve_for_omega(S, K), power_base=False, log=False)
    big_h = antiderivative(h, K)
    a_k = canonicalize(sp.expand(big_h.subs(K, K + 1) - big_h, power_exp=False, log=False))
    term = detect(a_k)
    return SequenceTerm(term.body, term.kind, term.coeffs, _first_valid_index(a_k))


# ---------------------------------------------------------------------------
# intervals


class Inclusion(enum.Enum):
    INCLUDED = "included"
    EXCLUDED = "excluded"
    HALF = "half"


_WEIGHT = {Inclusion.INCLUDED: sp.S.Half, Inclusion.EXCLUDED: -sp.S.Half, Inclusion.HALF: sp.S.Zero}
_POINT = {Inclusion.INCLUDED: sp.S.One, Inclusion.EXCLUDED: sp.S.Zero, Inclusion.HALF: sp.S.Half}


@dataclass(frozen=True)
class IntervalSpec:
    """Interval with endpoints that are rationals or +-w (w stands for infinity)."""

    lo: sp.Expr
    hi: sp.Expr
    lo_inclusion: Inclusion = Inclusion.INCLUDED
    hi_inclusion: Inclusion = Inclusion.EXCLUDED

    def __post_init__(self):
        for end in (self.lo, self.hi):
            if not (end.is_Rational or end in (OMEGA, -OMEGA)):
                raise ValueError(f"endpoint {end} must be rational or +-w")
        if _endpoint_key(self.lo) > _endpoint_key(self.hi):
            raise ValueError("interval endpoints out of order")


def _endpoint_key(e: sp.Expr):
    if e == OMEGA:
        return (1, 0)
    if e == -OMEGA:
        return (-1, 0)
    return (0, e)


_OPEN = {"[": Inclusion.INCLUDED, "(": Inclusion.EXCLUDED, "<": Inclusion.HALF}
_CLOSE = {"]": Inclusion.INCLUDED, ")": Inclusion.EXCLUDED, ">": Inclusion.HALF}


def parse_interval(text: str) -> IntervalSpec:
    """``[a,b)`` style notation; ``<`` / ``>`` mark a half-included endpoint.

    ``inf`` and ``w`` both denote the omega endpoint.
    """
    from .expr import parse

    t = text.strip()
    if len(t) < 5 or t[0] not in _OPEN or t[-1] not in _CLOSE or "," not in t:
        raise ValueError(f"malformed interval {text!r}")
    lo_s, hi_s = t[1:-1].split(",", 1)

    def endpoint(s: str):
        s = s.strip().replace("-inf", "-w").replace("inf", "w")
        return parse(s)

    return IntervalSpec(endpoint(lo_s), endpoint(hi_s), _OPEN[t[0]], _CLOSE[t[-1]])


def interval_numerosity(iv: IntervalSpec) -> sp.Expr:
    """length * W + Euler characteristic."""
    if iv.lo == iv.hi:
        return min(_POINT[iv.lo_inclusion], _POINT[iv.hi_inclusion])
    chi = _WEIGHT[iv.lo_inclusion] + _WEIGHT[iv.hi_inclusion]
    return canonicalize(sp.expand((iv.hi - iv.lo) * OMEGA1) + chi)
