"""Descending transmonomial expansions of expressions in w.

``expand`` turns an expression into a :class:`NormalForm` (all infinite and
finite terms plus a requested number of infinitesimal ones), ``split``
separates the purely infinite, finite and infinitesimal parts, ``refine``
trims the infinitesimal tail and ``asymptotic_inverse`` solves g(k) = w for k
by Newton iteration on expansions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .antideriv import antiderivative, _at
from .errors import (
    IncomparableMonomials,
    NotInvertible,
    OrderUnreachable,
    UnsupportedExpansion,
)
from .expr import OMEGA, canonicalize, surreal_symbols, to_text, var
from .series_engine import (
    UNIT,
    OMEGA_KEY,
    UNIT_GROWTH,
    Key,
    NeedPrecision,
    Series,
    expand_series,
    growth_cmp,
    growth_mul,
    growth_pow,
    key_cmp,
    pow_series,
    sign_of,
    sorted_keys,
)

DEFAULT_ORDER = 2
_MAX_PRECISION = 48


@dataclass(frozen=True)
class Transmonomial:
    coeff: sp.Expr
    eexp: sp.Expr = sp.S.Zero
    wexp: sp.Expr = sp.S.Zero
    lexp: int = 0
    w1exp: sp.Expr = sp.S.Zero
    dW1pow: tuple = ()
    atom: sp.Expr = sp.S.Zero

    @property
    def key(self) -> Key:
        return Key(self.atom, self.eexp, self.wexp, self.lexp, self.w1exp, self.dW1pow)

    @classmethod
    def from_key(cls, key: Key, coeff) -> "Transmonomial":
        return cls(coeff, key.e, key.q, key.m, key.s, key.d, key.atom)

    def to_expr(self) -> sp.Expr:
        return self.coeff * self.key.to_expr()


@dataclass(frozen=True)
class NormalForm:
    terms: tuple = ()
    truncation_order: int = 0
    truncated: bool = False

    def to_expr(self) -> sp.Expr:
        return canonicalize(sp.Add(*[t.to_expr() for t in self.terms]))

    def __str__(self) -> str:
        return to_text(self.to_expr())

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SurrealParts:
    infinite: NormalForm
    finite: sp.Expr
    infinitesimal: NormalForm = field(default_factory=NormalForm)

    def recombine(self) -> NormalForm:
        terms = list(self.infinite.terms)
        if self.finite != 0:
            terms.append(Transmonomial(self.finite))
        terms.extend(self.infinitesimal.terms)
        return NormalForm(tuple(terms), self.infinitesimal.truncation_order,
                          self.infinitesimal.truncated)


def _is_infinitesimal(k: Key) -> bool:
    if k.s != 0 or k.d:
        try:
            return growth_cmp(k.growth, UNIT_GROWTH) < 0
        except IncomparableMonomials:
            return False
    try:
        return growth_cmp(k.growth, UNIT_GROWTH) < 0
    except IncomparableMonomials:
        return False


def _certified(series: Series, order: int) -> bool:
    if series.bound is None:
        return True
    if growth_cmp(series.bound, UNIT_GROWTH) >= 0:
        return False
    small = sum(1 for k, _ in series.terms if _is_infinitesimal(k))
    return small >= order


def _normal_form(series: Series, order: int) -> NormalForm:
    coeffs = dict(series.terms)
    kept, small = [], 0
    dropped = False
    for k in sorted_keys(coeffs):
        if _is_infinitesimal(k):
            if small >= order:
                dropped = True
                continue
            small += 1
        kept.append(Transmonomial.from_key(k, coeffs[k]))
    return NormalForm(tuple(kept), order, dropped or series.bound is not None)


def expand_to_series(e: sp.Expr, order: int) -> Series:
    e = sp.sympify(e)
    for precision in range(order + 3, _MAX_PRECISION + 1, 3):
        try:
            s = expand_series(e, precision)
        except NeedPrecision:
            continue
        if _certified(s, order):
            return s
    raise UnsupportedExpansion(f"could not certify {order} infinitesimal terms of {e}")


def expand(e, order: int = DEFAULT_ORDER) -> NormalForm:
    """Descending expansion keeping every non-infinitesimal term and ``order`` small ones."""
    if isinstance(e, NormalForm):
        e = e.to_expr()
    s = expand_to_series(e, order)
    if order > 0 and s.bound is not None and any(k.atom != 0 for k, _ in s.terms):
        raise UnsupportedExpansion("opaque exponentials are expanded at order 0 only")
    return _normal_form(s, order)


def _classify(t: Transmonomial) -> int:
    k = t.key
    if k == UNIT:
        return 0
    g = growth_cmp(k.growth, UNIT_GROWTH)
    if k.d:
        raise IncomparableMonomials(f"magnitude of {t.to_expr()} depends on dW")
    if k.s != 0:
        sg = sign_of(k.s)
        if sg is None or (g != 0 and sg != g):
            raise IncomparableMonomials(f"cannot place {t.to_expr()} relative to 1")
        return sg
    return g


def split(nf: NormalForm) -> SurrealParts:
    big, small = [], []
    finite = sp.S.Zero
    for t in nf.terms:
        c = _classify(t)
        if c > 0:
            big.append(t)
        elif c < 0:
            small.append(t)
        else:
            finite = t.coeff
    return SurrealParts(
        NormalForm(tuple(big)),
        finite,
        NormalForm(tuple(small), nf.truncation_order, nf.truncated),
    )


def refine(nf: NormalForm) -> NormalForm:
    """Drop the infinitesimal part."""
    parts = split(nf)
    terms = list(parts.infinite.terms)
    if parts.finite != 0:
        terms.append(Transmonomial(parts.finite))
    return NormalForm(tuple(terms))


def finite_part(e) -> sp.Expr:
    """Coefficient of the unit monomial; terms of unknown magnitude are never finite."""
    nf = e if isinstance(e, NormalForm) else expand(e, 0)
    for t in nf.terms:
        if t.key == UNIT:
            return t.coeff
    return sp.S.Zero


# ---------------------------------------------------------------------------
# improper integrals and inversion


def improper_integral_to_surreal(integrand, lower, t: sp.Symbol | None = None) -> sp.Expr:
    """Map the divergent integral of ``integrand`` from ``lower`` to infinity to G(w) - G(lower).

    ``lower`` must lie in the integrand's domain. The finite part of the result
    depends on it through -G(lower); nothing here absorbs that constant.
    """
    t = t or var("t")
    G = antiderivative(sp.sympify(integrand), t)
    return canonicalize(G.subs(t, OMEGA) - _at(G, t, sp.sympify(lower)))


def _leading_inverse(g_w: sp.Expr) -> sp.Expr:
    s = expand_to_series(g_w, 0)
    if not s.terms:
        raise NotInvertible("function has no dominant term")
    key, c = s.lead()
    if key.atom != 0 or key.s != 0 or key.d:
        raise NotInvertible(f"dominant term {key.to_expr()} is not a power or exponential of w")
    if growth_cmp(key.growth, UNIT_GROWTH) <= 0 or sign_of(c) != 1:
        raise NotInvertible("no positive dominant growth")
    if key.e == 0:
        if key.m != 0:
            raise OrderUnreachable("inverting w^q ln(w)^m needs iterated logarithms")
        return canonicalize((OMEGA / c) ** (1 / key.q))
    if key.q != 0 or key.m != 0:
        raise OrderUnreachable("inverting w^q e^(rw) needs the Lambert function")
    return canonicalize(sp.log(OMEGA / c) / key.e)


def _growth_div(g1, g2):
    return growth_mul(g1, growth_pow(g2, -1))


def _needed(series: Series, order: int, level) -> tuple[bool, Series]:
    """Terms of ``series`` above ``level`` and whether they cover the requested order."""
    kept = [(k, c) for k, c in series.terms
            if level is None or growth_cmp(k.growth, level) > 0]
    cert = Series.make(kept)
    if level is not None and growth_cmp(level, UNIT_GROWTH) >= 0:
        return False, cert
    small = sum(1 for k, _ in kept if _is_infinitesimal(k))
    return level is None or small >= order, cert


def _polynomial_evaluator(g, k):
    """Horner evaluation of g on a series when g is a polynomial in k, else None."""
    try:
        poly = sp.Poly(g, k)
    except sp.PolynomialError:
        return None
    coeffs = poly.all_coeffs()
    if any(surreal_symbols(c) for c in coeffs):
        return None

    def at(x: Series) -> Series:
        out = Series(())
        for c in coeffs:
            out = out * x + Series.const(c)
        return out
    return at


def _evaluator(g, k, precision):
    fast = _polynomial_evaluator(g, k)
    if fast is not None:
        return fast
    return lambda x: expand_series(g.subs(k, x.to_expr()), precision)


def asymptotic_inverse(g, order: int = DEFAULT_ORDER, k: sp.Symbol | None = None) -> sp.Expr:
    """Expansion of the inverse function of ``g`` evaluated at w.

    Returns every non-infinitesimal term of k(w) with g(k(w)) = w and the first
    ``order`` infinitesimal ones.
    """
    k = k or var("k")
    g = sp.sympify(g)
    dg = sp.diff(g, k)
    start = _leading_inverse(g.subs(k, OMEGA))
    for precision in range(order + 4, _MAX_PRECISION + 1, 4):
        approx = expand_to_series(start, order + 2)
        best = -1
        stalled = 0
        g_at, dg_at = _evaluator(g, k, precision), _evaluator(dg, k, precision)
        try:
            for _ in range(40):
                r = g_at(approx) - Series.monomial(OMEGA_KEY)
                gp = dg_at(approx)
                if not gp.terms:
                    raise NeedPrecision
                if r.terms:
                    level = _growth_div(r.lead()[0].growth, gp.lead()[0].growth)
                elif r.bound is not None:
                    level = _growth_div(r.bound, gp.lead()[0].growth)
                else:
                    level = None
                done, cert = _needed(approx, order, level)
                if done:
                    return _normal_form(cert, order).to_expr()
                n_cert = len(cert.terms)
                stalled = stalled + 1 if n_cert <= best else 0
                best = max(best, n_cert)
                if stalled >= 3 or not r.terms:
                    break
                delta = r * pow_series(gp, -1, precision)
                nxt = approx - delta
                approx = Series.make(sorted_terms_limited(nxt, n_cert + order + 6))
        except NeedPrecision:
            continue
        except UnsupportedExpansion as exc:
            raise OrderUnreachable(str(exc)) from exc
    raise OrderUnreachable(f"could not certify {order} infinitesimal terms of the inverse")


def sorted_terms_limited(series: Series, limit: int):
    coeffs = dict(series.terms)
    return [(key, coeffs[key]) for key in sorted_keys(coeffs)[:limit]]


def expansion_residual(g, inverse: sp.Expr, order: int, k: sp.Symbol | None = None) -> Series:
    """g(inverse) - w as a certified series (test support)."""
    k = k or var("k")
    return expand_to_series(sp.sympify(g).subs(k, inverse) - OMEGA, order)


__all__ = [
    "DEFAULT_ORDER",
    "NormalForm",
    "SurrealParts",
    "Transmonomial",
    "asymptotic_inverse",
    "expand",
    "finite_part",
    "improper_integral_to_surreal",
    "key_cmp",
    "refine",
    "split",
]
