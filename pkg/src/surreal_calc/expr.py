"""Exact expression trees: symbols, text grammar, canonical printer, arithmetic.

Expressions are immutable sympy trees.  The kernel fixes its own vocabulary on
top of them:

* ``w``  -- omega, the image of the identity germ at infinity;
* ``W``  -- omega_1, the numerosity of ``[0, 1)``;
* ``dW``, ``dW(n)`` -- the opaque n-th derivation of omega_1;
* any other identifier -- a positive real parameter.

The printer emits the same grammar the parser reads, so ``parse(to_text(e))``
reproduces ``e`` structurally.
"""

from __future__ import annotations

import functools
import math
import os
import re
from fractions import Fraction
from typing import Mapping

import mpmath
import sympy as sp

from .errors import DomainError, ParseError, PowError, UnboundSymbol

Expr = sp.Expr

OMEGA = sp.Symbol("w", positive=True)
OMEGA1 = sp.Symbol("W", positive=True)

FUNCTIONS = {
    "exp": sp.exp,
    "ln": sp.log,
    "sqrt": sp.sqrt,
    "Gamma": sp.gamma,
    "lnGamma": sp.loggamma,
    "psi": sp.digamma,
    "zeta": sp.zeta,
    # accepted so that such inputs are rejected by the kernels, not the parser
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
}
CONSTANTS = {"pi": sp.pi, "gamma": sp.EulerGamma, "e": sp.E}
RESERVED = set(FUNCTIONS) | set(CONSTANTS) | {"w", "W", "dW", "log"}

LN2PI_HALF = sp.log(2 * sp.pi) / 2

_DW_NAME = re.compile(r"^dW(?:\((\d+)\))?$")


@functools.lru_cache(maxsize=None)
def d_omega1(n: int = 1) -> sp.Symbol:
    """Opaque symbol for the n-th derivation of omega_1.

    The first one is positive (the derivation is positive on positive infinite
    numbers); higher orders have no known sign.
    """
    if n < 1:
        raise ValueError("derivative order must be positive")
    if n == 1:
        return sp.Symbol("dW", positive=True)
    return sp.Symbol(f"dW({n})", real=True)


@functools.lru_cache(maxsize=None)
def var(name: str) -> sp.Symbol:
    if name in RESERVED:
        raise ValueError(f"{name!r} is reserved")
    return sp.Symbol(name, positive=True)


def dw_order(sym) -> int | None:
    """Return n when ``sym`` is dW(n), else None."""
    if not isinstance(sym, sp.Symbol):
        return None
    m = _DW_NAME.match(sym.name)
    if m is None:
        return None
    return int(m.group(1) or 1)


def is_surreal_symbol(sym) -> bool:
    return sym == OMEGA or sym == OMEGA1 or dw_order(sym) is not None


def surreal_symbols(e: Expr) -> set:
    return {s for s in e.free_symbols if is_surreal_symbol(s)}


def is_real_constant(e: Expr) -> bool:
    """True when ``e`` contains none of the surreal symbols."""
    return not surreal_symbols(sp.sympify(e))


def default_precision() -> int:
    return int(os.environ.get("SURREAL_CALC_PRECISION", "30"))


# ---------------------------------------------------------------------------
# canonicalization


def _min_square_multiplier(den: int) -> int:
    s = 1
    for p, k in sp.factorint(den).items():
        s *= p ** ((k + 1) // 2)
    return s


def _square_part(n: int) -> int:
    f = 1
    for p, k in sp.factorint(n).items():
        f *= p ** (k // 2)
    return f


def _normalize_sqrt(base: Expr):
    """Write sqrt(base) as r*sqrt(P) with P having coprime-ish integer coefficients.

    Returns (r, P) or None when ``base`` is not a sum with rational coefficients.
    """
    if not isinstance(base, sp.Add):
        return None
    coeffs = []
    rests = []
    for t in base.args:
        c, rest = t.as_coeff_Mul()
        if not c.is_Rational:
            return None
        coeffs.append(Fraction(int(c.p), int(c.q)))
        rests.append(rest)
    den = math.lcm(*(c.denominator for c in coeffs))
    s = _min_square_multiplier(den)
    ints = [int(c * s * s) for c in coeffs]
    f = _square_part(math.gcd(*ints))
    if s == 1 and f == 1:
        return None
    new_base = sp.Add(*[sp.Integer(n // (f * f)) * r for n, r in zip(ints, rests)])
    return sp.Rational(f, s), new_base


def canonicalize(e: Expr) -> Expr:
    """Apply the kernel's rewrite rules on top of sympy's automatic form.

    The only extra rule is the radical normal form: a square root of a sum with
    rational coefficients becomes ``sqrt(P)/s`` with ``P`` integral and ``s``
    the smallest integer that makes it so.
    """
    e = sp.sympify(e)
    if e.is_Atom:
        return e
    return _canon(sp.powsimp(e, combine="exp", deep=True))


def _canon(e: Expr) -> Expr:
    if e.is_Atom:
        return e
    args = [_canon(a) for a in e.args]
    if isinstance(e, sp.Pow):
        base, ex = args
        if ex in (sp.S.Half, -sp.S.Half):
            norm = _normalize_sqrt(base)
            if norm is not None:
                r, p = norm
                return _canon(r**ex * sp.Pow(p, ex)) if ex < 0 else r * sp.sqrt(p)
        return _checked_pow(base, ex)
    return e.func(*args)


def _checked_pow(base: Expr, ex: Expr) -> Expr:
    if base == 0 and ex.is_Number and ex < 0:
        raise PowError("0 raised to a negative power")
    r = sp.Pow(base, ex)
    if r.has(sp.zoo, sp.nan):
        raise PowError(f"undefined power {base}^{ex}")
    return r


def add(a: Expr, b: Expr) -> Expr:
    return canonicalize(sp.sympify(a) + sp.sympify(b))


def mul(a: Expr, b: Expr) -> Expr:
    return canonicalize(sp.sympify(a) * sp.sympify(b))


def neg(a: Expr) -> Expr:
    return canonicalize(-sp.sympify(a))


def pow_(a: Expr, b: Expr) -> Expr:
    return canonicalize(_checked_pow(sp.sympify(a), sp.sympify(b)))


def structurally_equal(a: Expr, b: Expr) -> bool:
    return canonicalize(a) == canonicalize(b)


def _flat_expand(e: Expr) -> Expr:
    return sp.expand(e, deep=True, mul=True, multinomial=True, power_exp=False,
                     power_base=False, log=False)


def equivalent(a: Expr, b: Expr) -> bool:
    """Exact symbolic equality.

    Canonical forms agree, possibly after distributing products, or their
    difference cancels as a rational function of its non-polynomial atoms.
    """
    ca, cb = canonicalize(a), canonicalize(b)
    if ca == cb:
        return True
    if canonicalize(_flat_expand(ca)) == canonicalize(_flat_expand(cb)):
        return True
    return sp.cancel(_flat_expand(ca - cb)) == 0


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             {"number", "identifier", "operator"})
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, bindings: Mapping[str, Expr]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.bindings = bindings

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, value, pos = self.take()
        if value != op or kind != "op":
            raise ParseError(f"unexpected {value or 'end of input'!r}", pos, {op})
        return pos

    def parse(self):
        e = self.expr()
        kind, value, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {value!r}", pos, {"+", "-", "*", "/", "^", "end of input"})
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if rhs == 0:
                    raise PowError(f"division by zero at offset {pos}")
                e = e * _checked_pow(rhs, sp.S.NegativeOne)
        return e

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in ("-", "+"):
            self.take()
            inner = self.unary()
            return -inner if value == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            ex = self.unary()
            return _checked_pow(base, ex)
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return sp.Rational(value) if ("." in value or "e" in value.lower()) else sp.Integer(value)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "ident":
            if value in FUNCTIONS or value == "log":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                fn = FUNCTIONS.get(value, sp.log)
                if fn is sp.log and arg == 0:
                    raise DomainError(f"ln(0) at offset {pos}")
                return fn(arg)
            if value in CONSTANTS:
                return CONSTANTS[value]
            if value == "w":
                return OMEGA
            if value == "W":
                return OMEGA1
            if value == "dW":
                if self.peek()[1] == "(":
                    self.take()
                    k, n, npos = self.take()
                    if k != "num" or not n.isdigit() or int(n) < 1:
                        raise ParseError("expected positive integer", npos, {"integer"})
                    self.expect(")")
                    return d_omega1(int(n))
                return d_omega1(1)
            if value in self.bindings:
                return sp.sympify(self.bindings[value])
            return var(value)
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos,
                         {"number", "identifier", "("})


def parse(text: str, bindings: Mapping[str, object] | None = None) -> Expr:
    """Parse ``text`` into a canonical expression.

    ``bindings`` maps identifier names to values (numbers, strings or exprs)
    substituted at parse time.
    """
    b = {}
    for name, value in (bindings or {}).items():
        b[name] = parse(value) if isinstance(value, str) else sp.sympify(value)
    return canonicalize(_Parser(text, b).parse())


# ---------------------------------------------------------------------------
# printer

_FN_NAMES = {
    sp.exp: "exp",
    sp.log: "ln",
    sp.gamma: "Gamma",
    sp.loggamma: "lnGamma",
    sp.digamma: "psi",
    sp.zeta: "zeta",
    sp.sin: "sin",
    sp.cos: "cos",
    sp.tan: "tan",
}
_CONST_NAMES = {sp.pi: "pi", sp.E: "e", sp.EulerGamma: "gamma"}


def _probe_value(sym):
    if sym == OMEGA:
        return mpmath.mpf(10) ** 20
    if sym == OMEGA1:
        return mpmath.mpf(10) ** 25
    if dw_order(sym) is not None:
        return mpmath.mpf("1.5")
    return mpmath.mpf("2.5")


@functools.lru_cache(maxsize=4096)
def _magnitude(term: Expr) -> float:
    """log10 of |term| at a far-out probe point; orders sum terms by growth."""
    try:
        with mpmath.workdps(20):
            syms = sorted(term.free_symbols, key=lambda s: s.name)
            f = sp.lambdify(syms, term, modules="mpmath")
            v = f(*[_probe_value(s) for s in syms])
            v = abs(v)
            if v == 0:
                return -math.inf
            return float(mpmath.log10(v))
    except Exception:
        return 0.0


def _add_terms(e: sp.Add):
    return sorted(e.args, key=lambda t: (-_magnitude(t), sp.default_sort_key(t)))


def _is_negative_term(t: Expr) -> bool:
    c, _ = t.as_coeff_Mul()
    return c.is_Number and c < 0


def _factor_key(f: Expr):
    base = f.base if isinstance(f, sp.Pow) else f
    if base in _CONST_NAMES or isinstance(base, sp.zeta):
        return (0, _CONST_NAMES.get(base, "zeta"), 0, sp.default_sort_key(f))
    if isinstance(f, sp.Add):
        return (1, "", 0, sp.default_sort_key(f))
    if isinstance(base, sp.Symbol):
        return (2, base.name.lower(), base.name.islower(), sp.default_sort_key(f))
    if isinstance(base, sp.Function):
        return (3, "", 0, sp.default_sort_key(f))
    return (4, "", 0, sp.default_sort_key(f))


def _is_atomic_text(e: Expr) -> bool:
    if isinstance(e, sp.Integer):
        return e >= 0
    if isinstance(e, (sp.Symbol, sp.NumberSymbol)) or e in _CONST_NAMES:
        return True
    if isinstance(e, sp.Function):
        return True
    if isinstance(e, sp.Pow) and e.exp == sp.S.Half and not isinstance(e.base, sp.Symbol):
        return True
    return False


def _print_rational(r: sp.Rational) -> str:
    return str(r.p) if r.q == 1 else f"{r.p}/{r.q}"


def _print_power(base: Expr, ex: Expr) -> str:
    if ex == sp.S.Half and not isinstance(base, sp.Symbol):
        return f"sqrt({_print(base, False)})"
    if base == sp.E:
        return f"exp({_print(ex, False)})"
    b = _print(base, False)
    if not _is_atomic_text(base):
        b = f"({b})"
    x = _print(ex, False)
    if not ((isinstance(ex, sp.Integer) and ex >= 0) or isinstance(ex, sp.Symbol)):
        x = f"({x})"
    return f"{b}^{x}"


def _print_factor(f: Expr) -> str:
    if isinstance(f, sp.Pow):
        return _print_power(f.base, f.exp)
    s = _print(f, False)
    if isinstance(f, (sp.Add, sp.Mul)) or (f.is_Number and (f < 0 or not f.is_Integer)):
        return f"({s})"
    return s


def _print_mul(e: Expr) -> str:
    coeff, rest = e.as_coeff_Mul()
    if not coeff.is_Rational:
        coeff, rest = sp.S.One, e
    factors = list(sp.Mul.make_args(rest))
    sign = "-" if coeff < 0 else ""
    coeff = abs(coeff)
    if factors == [sp.log(2 * sp.pi)] and coeff.q == 2:
        return f"{sign}({coeff.p}/2)*ln(2*pi)"
    num, den = [], []
    for f in factors:
        if isinstance(f, sp.Pow) and f.exp.is_Number and f.exp < 0:
            den.append(sp.Pow(f.base, -f.exp))
        else:
            num.append(f)
    num.sort(key=_factor_key)
    den.sort(key=_factor_key)
    num_s = [_print_factor(f) for f in num]
    if coeff.p != 1 or not num_s:
        num_s.insert(0, str(coeff.p))
    den_s = [_print_factor(f) for f in den]
    if coeff.q != 1:
        den_s.insert(0, str(coeff.q))
    out = sign + "*".join(num_s)
    if den_s:
        d = den_s[0] if len(den_s) == 1 else "(" + "*".join(den_s) + ")"
        out += "/" + d
    return out


def _print(e: Expr, top: bool) -> str:
    if isinstance(e, sp.Rational):
        return _print_rational(e)
    if e in _CONST_NAMES:
        return _CONST_NAMES[e]
    if isinstance(e, sp.Symbol):
        return e.name
    if isinstance(e, sp.Add):
        plus, minus = (" + ", " - ") if top else ("+", "-")
        out = ""
        for i, t in enumerate(_add_terms(e)):
            neg_t = _is_negative_term(t)
            body = _print(-t if neg_t else t, False)
            if i == 0:
                out = ("-" if neg_t else "") + body
            else:
                out += (minus if neg_t else plus) + body
        return out
    if isinstance(e, sp.Mul):
        return _print_mul(e)
    if isinstance(e, sp.Pow):
        if e.exp.is_Number and e.exp < 0:
            return _print_mul(e)
        return _print_power(e.base, e.exp)
    if isinstance(e, sp.exp):
        return f"exp({_print(e.args[0], False)})"
    if isinstance(e, sp.polygamma) and e.args[0] == 0:
        return f"psi({_print(e.args[1], False)})"
    for fn, name in _FN_NAMES.items():
        if isinstance(e, fn):
            return f"{name}({_print(e.args[0], False)})"
    raise ValueError(f"cannot print {e!r}")


def to_text(e: Expr) -> str:
    """Canonical text for ``e`` in the parser's grammar."""
    return _print(canonicalize(e), True)


# ---------------------------------------------------------------------------
# numeric evaluation


def _binding_value(v):
    if isinstance(v, str):
        return mpmath.mpf(v)
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, sp.Basic):
        return mpmath.mpf(sp.N(v, mpmath.mp.dps).__str__())
    return mpmath.mpf(v)


def _symbol_name_aliases(sym) -> set:
    names = {sym.name}
    if sym == OMEGA:
        names |= {"omega"}
    elif sym == OMEGA1:
        names |= {"omega1"}
    return names


def eval_numeric(e: Expr, bindings: Mapping | None = None, precision: int | None = None):
    """Evaluate ``e`` to ``precision`` significant digits with every symbol bound."""
    precision = precision or default_precision()
    bindings = dict(bindings or {})
    e = sp.sympify(e)
    syms = sorted(e.free_symbols, key=lambda s: s.name)
    with mpmath.workdps(precision + 15):
        values = []
        for s in syms:
            for key in (s, *sorted(_symbol_name_aliases(s))):
                if key in bindings:
                    values.append(_binding_value(bindings[key]))
                    break
            else:
                raise UnboundSymbol(f"symbol {s.name!r} is not bound")
        f = sp.lambdify(syms, e, modules="mpmath")
        try:
            v = f(*values)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(str(exc)) from exc
        if isinstance(v, mpmath.mpc):
            if abs(v.imag) > abs(v) * mpmath.mpf(10) ** (-precision) and v.imag != 0:
                raise DomainError(f"complex value {v} (argument outside function domain)")
            v = v.real
        if not mpmath.isfinite(v):
            raise DomainError(f"non-finite value {v}")
        return +v


# ---------------------------------------------------------------------------
# JSON AST


def to_json(e: Expr) -> dict:
    e = sp.sympify(e)
    if isinstance(e, sp.Rational):
        return {"kind": "rational", "num": int(e.p), "den": int(e.q)}
    if e in _CONST_NAMES:
        return {"kind": "constant", "name": _CONST_NAMES[e]}
    if isinstance(e, sp.Symbol):
        if e == OMEGA:
            return {"kind": "symbol", "name": "omega"}
        if e == OMEGA1:
            return {"kind": "symbol", "name": "omega1"}
        n = dw_order(e)
        if n is not None:
            return {"kind": "symbol", "name": "dOmega1", "n": n}
        return {"kind": "var", "name": e.name}
    if isinstance(e, sp.Add):
        return {"kind": "sum", "terms": [to_json(t) for t in _add_terms(e)]}
    if isinstance(e, sp.Mul):
        return {"kind": "product", "factors": [to_json(f) for f in sorted(e.args, key=_factor_key)]}
    if isinstance(e, sp.Pow):
        return {"kind": "power", "base": to_json(e.base), "exponent": to_json(e.exp)}
    if isinstance(e, sp.exp):
        return {"kind": "exp", "arg": to_json(e.args[0])}
    if isinstance(e, sp.log):
        return {"kind": "ln", "arg": to_json(e.args[0])}
    if isinstance(e, sp.polygamma) and e.args[0] == 0:
        return {"kind": "apply", "fn": "psi", "arg": to_json(e.args[1])}
    for fn, name in _FN_NAMES.items():
        if isinstance(e, fn):
            return {"kind": "apply", "fn": name, "arg": to_json(e.args[0])}
    raise ValueError(f"cannot export {e!r}")


def from_json(node: dict) -> Expr:
    kind = node["kind"]
    if kind == "rational":
        return sp.Rational(node["num"], node["den"])
    if kind == "constant":
        return CONSTANTS[node["name"]]
    if kind == "symbol":
        return {"omega": OMEGA, "omega1": OMEGA1}.get(node["name"]) or d_omega1(node["n"])
    if kind == "var":
        return var(node["name"])
    if kind == "sum":
        return canonicalize(sp.Add(*[from_json(t) for t in node["terms"]]))
    if kind == "product":
        return canonicalize(sp.Mul(*[from_json(f) for f in node["factors"]]))
    if kind == "power":
        return pow_(from_json(node["base"]), from_json(node["exponent"]))
    if kind == "exp":
        return sp.exp(from_json(node["arg"]))
    if kind == "ln":
        return sp.log(from_json(node["arg"]))
    if kind == "apply":
        return FUNCTIONS[node["fn"]](from_json(node["arg"]))
    raise ValueError(f"unknown node kind {kind!r}")
