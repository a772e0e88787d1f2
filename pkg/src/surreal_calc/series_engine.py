"""Truncated transseries arithmetic on the basis e^{r w} w^q (ln w)^m W^s prod dW(n)^j.

A :class:`Series` is a finite sum of exactly known terms plus an optional
O-bound: every term whose w-growth is at or below ``bound`` is unknown.
Operations propagate the bound the way big-O arithmetic does, so whatever
survives above it is exact.  ``precision`` (the number of powers of the small
part kept when composing with an analytic function) controls how much is
known; callers deepen it until enough terms are certified.

Growth is the tuple ``(atom, e, q, m)``.  ``atom`` is the exponent of an
opaque exponential such as w^w = exp(w ln w); such terms are only ever
carried, never expanded around.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import mpmath
import sympy as sp

from .bernoulli import bernoulli_number
from .errors import DomainError, IncomparableMonomials, UnsupportedExpansion
from .expr import OMEGA, OMEGA1, canonicalize, d_omega1, dw_order, surreal_symbols

ZERO = sp.S.Zero


class NeedPrecision(Exception):
    """Raised internally when the current precision cannot certify a term."""


# ---------------------------------------------------------------------------
# signs and growth


@functools.lru_cache(maxsize=8192)
def sign_of(x) -> int | None:
    x = sp.sympify(x)
    if x == 0:
        return 0
    if x.is_Number:
        return 1 if x > 0 else -1
    if x.is_positive:
        return 1
    if x.is_negative:
        return -1
    if x.is_zero:
        return 0
    if not x.free_symbols:
        v = sp.N(x, 50)
        if v.is_Number and abs(v) > sp.Float("1e-40"):
            return 1 if v > 0 else -1
        if simplify_coeff(x) == 0:
            return 0
    return None


@functools.lru_cache(maxsize=16384)
def simplify_coeff(c):
    c = sp.sympify(c)
    if c.is_Number:
        return c
    c = sp.expand(c, power_base=False, log=False)
    if c.is_Number:
        return c
    # a nonzero value at one sample point proves c != 0 without simplify
    sample = {s: sp.Rational(p, 7) for s, p in zip(sorted(c.free_symbols, key=str), _PRIMES)}
    try:
        v = sp.N(c.subs(sample), 60)
    except (TypeError, ValueError):
        v = None
    if v is not None and v.is_Number and abs(v) > sp.Float("1e-40"):
        return c
    return ZERO if sp.simplify(c) == 0 else c


_PRIMES = (11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


@dataclass(frozen=True)
class Key:
    atom: sp.Expr = ZERO   # exponent of an opaque exponential (0 = none)
    e: sp.Expr = ZERO      # exp(e*w)
    q: sp.Expr = ZERO      # w^q
    m: int = 0             # ln(w)^m
    s: sp.Expr = ZERO      # W^s
    d: tuple = ()          # ((n, power), ...) for dW(n)

    @property
    def growth(self):
        return (self.atom, self.e, self.q, self.m)

    @property
    def carried(self):
        return (self.s, self.d)

    def __mul__(self, other: "Key") -> "Key":
        d = dict(self.d)
        for n, j in other.d:
            d[n] = d.get(n, 0) + j
        return Key(
            canonicalize(self.atom + other.atom),
            simplify_coeff(self.e + other.e),
            simplify_coeff(self.q + other.q),
            self.m + other.m,
            simplify_coeff(self.s + other.s),
            tuple(sorted((n, j) for n, j in d.items() if j != 0)),
        )

    def __pow__(self, r) -> "Key":
        r = sp.sympify(r)
        m = self.m * r
        d = [(n, j * r) for n, j in self.d]
        if not sp.sympify(m).is_Integer or any(not sp.sympify(j).is_Integer for _, j in d):
            raise UnsupportedExpansion("non-integer power of ln(w) or dW leaves the basis")
        return Key(
            canonicalize(self.atom * r),
            simplify_coeff(self.e * r),
            simplify_coeff(self.q * r),
            int(m),
            simplify_coeff(self.s * r),
            tuple((n, int(j)) for n, j in d),
        )

    def is_unit(self) -> bool:
        return self == UNIT

    def to_expr(self) -> sp.Expr:
        out = _exp_as_powers(self.atom + self.e * OMEGA) * OMEGA**self.q * sp.log(OMEGA) ** self.m
        out *= OMEGA1**self.s
        for n, j in self.d:
            out *= d_omega1(n) ** j
        return out


def _exp_as_powers(x: sp.Expr) -> sp.Expr:
    """exp(x) with each c*ln(b)*y term written as b^(c*y)."""
    out = sp.S.One
    for term in sp.Add.make_args(sp.expand(x, power_exp=False, log=False)):
        logs = [f for f in sp.Mul.make_args(term) if isinstance(f, sp.log)]
        if len(logs) == 1:
            out *= logs[0].args[0] ** (term / logs[0])
        else:
            out *= sp.exp(term)
    return out


UNIT = Key()
OMEGA_KEY = Key(q=sp.S.One)


def growth_mul(g1, g2):
    return (canonicalize(g1[0] + g2[0]), simplify_coeff(g1[1] + g2[1]),
            simplify_coeff(g1[2] + g2[2]), g1[3] + g2[3])


def growth_pow(g, n: int):
    return (canonicalize(g[0] * n), simplify_coeff(g[1] * n), simplify_coeff(g[2] * n), g[3] * n)


def growth_cmp(g1, g2) -> int:
    """Compare w-growths; raises IncomparableMonomials when no sign is provable."""
    if g1 == g2:
        return 0
    for i, (a, b) in enumerate(zip(g1, g2)):
        diff = sp.expand(a - b) if not isinstance(a, int) else a - b
        sg = sign_of(_large_logs(diff) if i == 0 else diff)
        if sg is None:
            raise IncomparableMonomials(f"cannot order growth {a} against {b}")
        if sg:
            return sg
    return 0


UNIT_GROWTH = UNIT.growth


def _large_logs(x):
    """Opaque exponents are compared with ln(w), ln(W) known to be positive."""
    reps = {sp.log(OMEGA): sp.Dummy("lnw", positive=True),
            sp.log(OMEGA1): sp.Dummy("lnW", positive=True)}
    return x.subs(reps) if x.has(*reps) else x


def key_cmp(k1: Key, k2: Key) -> int:
    if k1 == k2:
        return 0
    if k1.carried == k2.carried:
        return growth_cmp(k1.growth, k2.growth)
    if k1.growth == k2.growth and k1.d == k2.d:
        sg = sign_of(sp.expand(k1.s - k2.s))
        if sg is None:
            raise IncomparableMonomials(f"cannot order W^{k1.s} against W^{k2.s}")
        return sg
    raise IncomparableMonomials(
        f"cannot compare {k1.to_expr()} with {k2.to_expr()}: omega_1 factors differ")


def _display_cmp(k1: Key, k2: Key) -> int:
    try:
        c = key_cmp(k1, k2)
        if c:
            return c
    except IncomparableMonomials:
        pass
    a, b = sp.default_sort_key(k1.to_expr()), sp.default_sort_key(k2.to_expr())
    return (a > b) - (a < b)


def sorted_keys(keys):
    return sorted(keys, key=functools.cmp_to_key(_display_cmp), reverse=True)


# ---------------------------------------------------------------------------
# series


@dataclass(frozen=True)
class Series:
    terms: tuple  # ((Key, coeff), ...)
    bound: tuple | None = None

    @staticmethod
    def make(items, bound=None) -> "Series":
        acc: dict = {}
        for k, c in items:
            acc[k] = acc.get(k, ZERO) + c
        out = []
        for k, c in acc.items():
            c = simplify_coeff(c)
            if c == 0:
                continue
            if bound is not None and growth_cmp(k.growth, bound) <= 0:
                continue
            out.append((k, c))
        return Series(tuple(out), bound)

    @staticmethod
    def const(c) -> "Series":
        return Series.make([(UNIT, sp.sympify(c))])

    @staticmethod
    def monomial(key: Key, c=sp.S.One) -> "Series":
        return Series.make([(key, sp.sympify(c))])

    def is_zero(self) -> bool:
        return not self.terms and self.bound is None

    def top(self):
        """Growth of the largest term, or the bound when nothing is known."""
        if self.terms:
            return self.lead()[0].growth
        return self.bound

    def lead(self):
        best = None
        for k, c in self.terms:
            if best is None or key_cmp(k, best[0]) > 0:
                best = (k, c)
        for k, _ in self.terms:
            if k != best[0] and k.growth == best[0].growth and k.carried != best[0].carried:
                key_cmp(k, best[0])
        return best

    def __add__(self, other: "Series") -> "Series":
        bound = _max_bound(self.bound, other.bound)
        return Series.make(list(self.terms) + list(other.terms), bound)

    def __neg__(self) -> "Series":
        return Series(tuple((k, -c) for k, c in self.terms), self.bound)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        if self.is_zero() or other.is_zero():
            return Series(())
        bound = None
        if self.bound is not None:
            bound = growth_mul(self.bound, other.top())
        if other.bound is not None:
            bound = _max_bound(bound, growth_mul(other.bound, self.top()))
        items = []
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                k = k1 * k2
                if bound is not None and growth_cmp(k.growth, bound) <= 0:
                    continue
                items.append((k, c1 * c2))
        return Series.make(items, bound)

    def scale(self, c) -> "Series":
        return Series.make([(k, c * v) for k, v in self.terms], self.bound)

    def shift(self, key: Key) -> "Series":
        bound = None if self.bound is None else growth_mul(self.bound, key.growth)
        return Series.make([(k * key, c) for k, c in self.terms], bound)

    def parts(self):
        """Split into (infinite-or-carried, unit coefficient, infinitesimal) series."""
        if self.bound is not None and growth_cmp(self.bound, UNIT_GROWTH) >= 0:
            raise NeedPrecision
        big, small, const = [], [], ZERO
        for k, c in self.terms:
            if k.is_unit():
                const = c
                continue
            g = growth_cmp(k.growth, UNIT_GROWTH)
            if g > 0 or (g == 0 and (k.s != 0 or k.d)):
                big.append((k, c))
            else:
                small.append((k, c))
        return Series.make(big), const, Series.make(small, self.bound)

    def to_expr(self) -> sp.Expr:
        return sp.Add(*[c * k.to_expr() for k, c in self.terms])


def _max_bound(b1, b2):
    if b1 is None:
        return b2
    if b2 is None:
        return b1
    return b1 if growth_cmp(b1, b2) >= 0 else b2


# ---------------------------------------------------------------------------
# composition with analytic functions


def _compose(coeffs, eps: Series, precision: int) -> Series:
    """sum_j coeffs[j] * eps^j for j <= precision, plus O(eps^(precision+1))."""
    if eps.is_zero():
        return Series.const(coeffs[0])
    top = eps.top()
    if growth_cmp(top, UNIT_GROWTH) >= 0:
        raise NeedPrecision
    result = Series.const(coeffs[0])
    power = Series.const(1)
    tail = growth_pow(top, precision + 1)
    for j in range(1, precision + 1):
        power = power * eps
        power = Series.make(power.terms, _max_bound(power.bound, tail))
        if coeffs[j] != 0:
            result = result + power.scale(coeffs[j])
    return Series.make(result.terms, _max_bound(result.bound, tail))


def _split_lead(a: Series):
    if not a.terms:
        raise NeedPrecision
    key, c = a.lead()
    inv = key ** -1
    eps = a.shift(inv).scale(1 / c) - Series.const(1)
    return key, c, eps


def pow_series(a: Series, r, precision: int) -> Series:
    r = sp.sympify(r)
    if r.is_Integer and 0 <= r <= 16:
        out = Series.const(1)
        for _ in range(int(r)):
            out = out * a
        return out
    if a.is_zero():
        if r.is_positive:
            return Series(())
        raise DomainError("0 raised to a non-positive power")
    key, c, eps = _split_lead(a)
    if not r.is_Integer and sign_of(c) == -1:
        raise UnsupportedExpansion("non-integer power of a negative leading term")
    lead = Series.monomial(key**r, canonicalize(c**r))
    coeffs = [sp.binomial(r, j) for j in range(precision + 1)]
    return lead * _compose(coeffs, eps, precision)


def log_series(a: Series, precision: int) -> Series:
    key, c, eps = _split_lead(a)
    if key.s != 0 or key.d:
        raise UnsupportedExpansion("ln of omega_1 is outside the basis")
    if key.m != 0:
        raise UnsupportedExpansion("ln(ln(w)) is outside the basis")
    if sign_of(c) == -1:
        raise DomainError(f"ln of a negative germ (leading coefficient {c})")
    items = [(UNIT, sp.log(c))]
    if key.e != 0:
        items.append((OMEGA_KEY, key.e))
    if key.q != 0:
        items.append((Key(m=1), key.q))
    head = Series.make(items)
    if key.atom != 0:
        head = head + expand_series(key.atom, precision)
    coeffs = [ZERO] + [sp.Rational((-1) ** (j + 1), j) for j in range(1, precision + 1)]
    return head + _compose(coeffs, eps, precision)


def _is_pure_power(k: Key) -> bool:
    return k.atom == 0 and k.e == 0 and k.m == 0 and k.s == 0 and not k.d


_LOG_KEY = Key(m=1)


def exp_series(a: Series, precision: int) -> Series:
    big, const, small = a.parts()
    head = Series.const(sp.exp(const))
    if big.terms:
        if any(k.e != 0 for k, _ in big.terms):
            raise UnsupportedExpansion("nested exponentials are outside the basis")
        rest = []
        for k, c in big.terms:
            if k == OMEGA_KEY:
                head = head.shift(Key(e=c))
            elif k == _LOG_KEY:
                head = head.shift(Key(q=c))
            else:
                rest.append((k, c))
        if rest and all(_is_pure_power(k) for k, _ in rest):
            raise UnsupportedExpansion(f"exp({big.to_expr()}) is outside the basis")
        if rest:
            head = head.shift(Key(atom=canonicalize(Series.make(rest).to_expr())))
    coeffs = [sp.Rational(1, sp.factorial(j)) for j in range(precision + 1)]
    return head * _compose(coeffs, small, precision)


def _require_infinite(a: Series, what: str):
    big, _, _ = a.parts()
    if not big.terms or growth_cmp(a.lead()[0].growth, UNIT_GROWTH) <= 0:
        raise UnsupportedExpansion(f"{what} needs a positive infinite argument")
    if sign_of(a.lead()[1]) != 1:
        raise UnsupportedExpansion(f"{what} needs a positive infinite argument")


def loggamma_series(a: Series, precision: int) -> Series:
    _require_infinite(a, "lnGamma")
    la = log_series(a, precision)
    out = (a - Series.const(sp.S.Half)) * la - a + Series.const(sp.log(2 * sp.pi) / 2)
    n_terms = max(1, precision // 2 + 1)
    for n in range(1, n_terms + 1):
        b = bernoulli_number(2 * n)
        c = sp.Rational(b.numerator, b.denominator) / (2 * n * (2 * n - 1))
        out = out + pow_series(a, -(2 * n - 1), precision).scale(c)
    tail = growth_pow(pow_series(a, -1, precision).top(), 2 * n_terms + 1)
    return Series.make(out.terms, _max_bound(out.bound, tail))


def digamma_series(a: Series, precision: int) -> Series:
    _require_infinite(a, "psi")
    out = log_series(a, precision) - pow_series(a, -1, precision).scale(sp.S.Half)
    n_terms = max(1, precision // 2 + 1)
    for n in range(1, n_terms + 1):
        b = bernoulli_number(2 * n)
        c = sp.Rational(b.numerator, b.denominator) / (2 * n)
        out = out - pow_series(a, -2 * n, precision).scale(c)
    tail = growth_pow(pow_series(a, -1, precision).top(), 2 * n_terms + 2)
    return Series.make(out.terms, _max_bound(out.bound, tail))


# ---------------------------------------------------------------------------
# expression -> series


def _opaque_exponential(exponent: sp.Expr) -> bool:
    return bool(exponent.has(OMEGA1) or exponent.has(sp.log(OMEGA))
                or any(dw_order(s) for s in exponent.free_symbols))


def _exp_of(exponent: sp.Expr, precision: int) -> Series:
    try:
        return exp_series(expand_series(exponent, precision), precision)
    except UnsupportedExpansion:
        if _opaque_exponential(exponent):
            return Series.monomial(Key(atom=canonicalize(exponent)))
        raise


def expand_series(e: sp.Expr, precision: int) -> Series:
    e = sp.sympify(e)
    if not surreal_symbols(e):
        return Series.const(e)
    if e == OMEGA:
        return Series.monomial(OMEGA_KEY)
    if e == OMEGA1:
        return Series.monomial(Key(s=sp.S.One))
    n = dw_order(e)
    if n is not None:
        return Series.monomial(Key(d=((n, 1),)))
    if isinstance(e, sp.Add):
        out = Series(())
        for t in e.args:
            out = out + expand_series(t, precision)
        return out
    if isinstance(e, sp.Mul):
        out = Series.const(1)
        for f in e.args:
            out = out * expand_series(f, precision)
        return out
    if isinstance(e, sp.Pow):
        base, ex = e.args
        if not surreal_symbols(ex):
            return pow_series(expand_series(base, precision), ex, precision)
        if base == sp.E:
            return _exp_of(ex, precision)
        return _exp_of(ex * sp.log(base), precision)
    if isinstance(e, sp.exp):
        return _exp_of(e.args[0], precision)
    if isinstance(e, sp.log):
        return log_series(expand_series(e.args[0], precision), precision)
    if isinstance(e, sp.loggamma):
        return loggamma_series(expand_series(e.args[0], precision), precision)
    if isinstance(e, sp.gamma):
        return exp_series(loggamma_series(expand_series(e.args[0], precision), precision),
                          precision)
    if isinstance(e, sp.polygamma) and e.args[0] == 0:
        return digamma_series(expand_series(e.args[1], precision), precision)
    if isinstance(e, sp.digamma):
        return digamma_series(expand_series(e.args[0], precision), precision)
    raise UnsupportedExpansion(f"{type(e).__name__} of a surreal argument is outside the basis")


def probe(e: sp.Expr, w_value, precision: int = 40):
    """High-precision value of ``e`` with w bound to ``w_value`` (test helper)."""
    with mpmath.workdps(precision):
        f = sp.lambdify([OMEGA], e, modules="mpmath")
        return f(mpmath.mpf(w_value))
