"""Surreal values of divergent series: the integral of the partial-sum function over [w, w+1]."""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .asymptotics import expand
from .bernoulli import power_sum_poly
from .errors import GermNotInJPlusR, UnsupportedExpansion, UnsupportedSeries
from .expr import OMEGA, _flat_expand, canonicalize, surreal_symbols, var
from .series_engine import sign_of

K = var("k")
T = var("t")

RAABE = OMEGA * sp.log(OMEGA) - OMEGA + sp.log(2 * sp.pi) / 2

_DEFAULT_START = {"power": 0, "polynomial": 0, "geometric": 0,
                  "log_k": 1, "reciprocal_k": 1, "digamma_k": 1}


@dataclass(frozen=True)
class SeriesTerm:
    """A series term a_k with its detected family and first index."""

    body: sp.Expr
    family: str
    param: sp.Expr = sp.S.Zero   # exponent for power, ratio for geometric
    start: int = 0


@dataclass(frozen=True)
class PartialSumForm:
    S: sp.Expr
    variable: sp.Symbol = T
    start: int = 0
    uniqueness_note: str = "closed form assumed unique among functions of bounded exponential type (Carlson), not certified"


def detect_series(body, start: int | None = None) -> SeriesTerm:
    body = canonicalize(sp.sympify(body))
    family, param = "unsupported", sp.S.Zero
    if surreal_symbols(body):
        pass
    elif body == sp.log(K):
        family = "log_k"
    elif body == 1 / K:
        family = "reciprocal_k"
    elif body == sp.digamma(K) or body == sp.polygamma(0, K):
        family = "digamma_k"
    elif (isinstance(body, sp.Pow) and not body.base.has(K)
          and not sp.simplify(body.exp / K).has(K)):
        ratio = canonicalize(body.base ** sp.simplify(body.exp / K))
        if ratio != 1 and sign_of(ratio) == 1:
            family, param = "geometric", ratio
    else:
        try:
            poly = sp.Poly(body, K)
        except sp.PolynomialError:
            poly = None
        if poly is not None and not any(c.has(K) for c in poly.all_coeffs()):
            monoms = poly.terms()
            if len(monoms) == 1 and monoms[0][1] == 1:
                family, param = "power", sp.Integer(monoms[0][0][0])
            else:
                family = "polynomial"
        elif isinstance(body, sp.Pow) and body.base == K:
            raise UnsupportedSeries(f"power family needs an integer exponent, got {body.exp}")
    if family == "unsupported":
        return SeriesTerm(body, family)
    default = _DEFAULT_START[family]
    if start is None:
        start = default
    if start < default:
        raise UnsupportedSeries(f"{body} is undefined at k = {start}")
    return SeriesTerm(body, family, param, start)


def _require(s) -> SeriesTerm:
    if not isinstance(s, SeriesTerm):
        s = detect_series(s)
    if s.family == "unsupported":
        raise UnsupportedSeries(f"unsupported series term: {s.body}")
    return s


def _head(s: SeriesTerm) -> sp.Expr:
    """sum_{k=default}^{start-1} a_k, removed when the series starts later."""
    default = _DEFAULT_START[s.family]
    return sp.Add(*[s.body.subs(K, k) for k in range(default, s.start)])


def partial_sum_closed_form(s) -> PartialSumForm:
    """S(t) with S(n) = a_start + ... + a_{n-1}."""
    s = _require(s)
    if s.family in ("power", "polynomial"):
        poly = sp.Poly(s.body, K)
        S = sp.Add(*[c * power_sum_poly(p[0], T) for p, c in poly.terms()])
    elif s.family == "geometric":
        p = s.param
        S = (p**T - 1) / (p - 1)
    elif s.family == "log_k":
        S = sp.loggamma(T)
    elif s.family == "reciprocal_k":
        S = sp.digamma(T) + sp.EulerGamma
    else:
        S = (T - 1) * sp.digamma(T) - (T - 1)
    return PartialSumForm(canonicalize(sp.expand(S - _head(s), power_exp=False, log=False)),
                          T, s.start)


def _unit_integral(term: sp.Expr) -> sp.Expr:
    """Integral of one additive piece of S over [w, w+1]."""
    if not term.has(T):
        return term
    try:
        poly = sp.Poly(term, T)
        if not any(c.has(T) for c in poly.all_coeffs()):
            G = sp.integrate(poly.as_expr(), T)
            return sp.expand(G.subs(T, OMEGA + 1) - G.subs(T, OMEGA))
    except sp.PolynomialError:
        pass
    coeff, rest = term.as_independent(T, as_Add=False)
    if isinstance(rest, sp.Pow) and not rest.base.has(T) and not sp.diff(rest.exp, T).has(T):
        ratio = canonicalize(rest.subs(T, 1) / rest.subs(T, 0))
        return coeff * rest.subs(T, OMEGA) * (ratio - 1) / sp.log(ratio)
    if isinstance(rest, sp.loggamma) and rest.args[0] == T:
        return coeff * RAABE
    psi = [f for f in sp.Mul.make_args(rest) if isinstance(f, sp.digamma)
           or (isinstance(f, sp.polygamma) and f.args[0] == 0)]
    if len(psi) == 1 and psi[0].args[-1] == T:
        P = sp.expand(rest / psi[0])
        if sp.Poly(P, T).degree() <= 1:
            lg = sp.loggamma(OMEGA)
            upper = P.subs(T, OMEGA + 1) * (lg + sp.log(OMEGA))
            lower = P.subs(T, OMEGA) * lg
            return coeff * (upper - lower - sp.diff(P, T) * RAABE)
    raise UnsupportedSeries(f"cannot integrate {term} over [w, w+1]")


def series_value(s) -> sp.Expr:
    """The surreal value of sum_k a_k."""
    s = _require(s)
    S = partial_sum_closed_form(s).S
    pieces = sp.Add.make_args(sp.expand(S, power_exp=False, log=False))
    value = canonicalize(_flat_expand(sp.Add(*[_unit_integral(p) for p in pieces])))
    try:
        expand(value, 0)
    except UnsupportedExpansion as exc:
        raise GermNotInJPlusR(f"value {value} has no expansion in the basis: {exc}") from exc
    return value
