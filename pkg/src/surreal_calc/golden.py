"""Runner for the shipped corpus of golden identities (``data/golden.txt``)."""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass, field
from importlib import resources

import sympy as sp

from .asymptotics import DEFAULT_ORDER, expand, finite_part
from .calculus import SurrealFunction, integrate_surreal_function
from .divergent import detect_series, series_value
from .envelope import ResultEnvelope, make_envelope
from .expr import canonicalize, equivalent, parse, to_text, var
from .numerosity import N_INTEGERS, detect, full_numerosity

PARAMETERS = ("a", "b", "c", "p", "alpha")
SPOT_CHECKS = 3


@dataclass(frozen=True)
class GoldenItem:
    id: str
    kind: str
    input: str
    expected: str
    line: int = 0

    @property
    def group(self) -> str:
        return self.id.split(".", 1)[0]


@dataclass
class GoldenOutcome:
    item: GoldenItem
    passed: bool
    computed: str
    envelope: ResultEnvelope | None
    details: list = field(default_factory=list)
    seconds: float = 0.0


def corpus_text() -> str:
    return resources.files("surreal_calc").joinpath("data/golden.txt").read_text(encoding="utf-8")


def load_corpus(text: str | None = None) -> list[GoldenItem]:
    items = []
    for n, raw in enumerate((corpus_text() if text is None else text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, expected = line.partition(" :: ")
        fields = [f.strip() for f in head.split(" | ")]
        if not sep or len(fields) != 3:
            raise ValueError(f"golden line {n} is malformed: {raw!r}")
        items.append(GoldenItem(fields[0], fields[1], fields[2], expected.strip(), n))
    return items


# group prefix -> name accepted by ``select``
GROUPS = {"N": "numerosity", "I": "integrals", "D": "series", "F": "constants"}


def select(items, pattern: str | None):
    """Keep items matching ``pattern``: a group name ("integrals"), a prefix ("I") or an id ("N.6")."""
    if not pattern:
        return list(items)
    p = pattern.strip().lower()
    for prefix, name in GROUPS.items():
        if p == name:
            p = prefix.lower()
    return [it for it in items if it.id.lower() == p or it.id.lower().startswith(p + ".")]


# ---------------------------------------------------------------------------
# evaluation of one identity


def _params(*exprs) -> list[sp.Symbol]:
    names = set()
    for e in exprs:
        names |= {s.name for s in e.free_symbols}
    return [var(n) for n in PARAMETERS if n in names]


def _spot_values(item_id: str, params):
    rng = random.Random(f"golden:{item_id}")
    for _ in range(SPOT_CHECKS):
        vals = {}
        for p in params:
            num, den = rng.randint(2, 19), rng.randint(1, 4)
            if num == den:
                num += 1
            vals[p] = sp.Rational(num, den)
        yield vals


def _compare(item_id, computed, expected, label=""):
    """Symbolic check, then the same identity at randomized rational parameters."""
    details = []
    ok = equivalent(computed, expected)
    if not ok:
        details.append(f"{label}mismatch: got {to_text(computed)}, expected {to_text(expected)}")
        return False, details
    params = _params(computed, expected)
    for vals in _spot_values(item_id, params) if params else ():
        a, b = canonicalize(computed.subs(vals)), canonicalize(expected.subs(vals))
        shown = ", ".join(f"{k}={v}" for k, v in vals.items())
        if not equivalent(a, b):
            details.append(f"{label}spot check failed at {shown}")
            return False, details
        details.append(f"{label}spot check {shown}: ok")
    return True, details


@dataclass(frozen=True)
class Check:
    """One computed value and the value the corpus expects for it."""

    label: str
    computed: sp.Expr
    expected: sp.Expr
    exact: bool = True
    headline: str | None = None


def _numerosity(item, order):
    res = full_numerosity(detect(parse(item.input)), order)
    expected, _, refined_txt = item.expected.partition(" ; refined: ")
    headline = f"full: {to_text(res.full)} | refined: {res.refined}"
    checks = [Check("", res.full, parse(expected), res.exact, headline)]
    if refined_txt:
        checks.append(Check("refined ", res.refined.to_expr(), parse(refined_txt), res.exact))
    return checks


_INTEGRAL = re.compile(r"^(?P<f>.+?)\s+d(?P<x>[A-Za-z_]\w*)\s*,\s*(?P<a>[^,]+),\s*(?P<b>[^,]+)$")


def _integrate(item, order):
    m = _INTEGRAL.match(item.input)
    if not m:
        raise ValueError(f"{item.id}: integral must read 'F dx, a, b'")
    F = SurrealFunction(parse(m["f"]), var(m["x"]))
    value = integrate_surreal_function(F, parse(m["a"]), parse(m["b"]))
    return [Check("", value, parse(item.expected))]


_SERIES = re.compile(
    r"^(?P<term>[^,]+?)(?:\s+from\s+(?P<start>-?\d+))?"
    r"(?:\s*,\s*(?P<spot>spot\s+)?(?P<param>[a-z]\w*)\s+in\s+(?P<vals>.+))?$"
)


def _subst(text: str, vals: dict) -> str:
    for name, v in vals.items():
        text = re.sub(rf"\b{name}\b", f"({v})", text)
    return text


def _series(item, order):
    m = _SERIES.match(item.input)
    if not m:
        raise ValueError(f"{item.id}: cannot read series input {item.input!r}")
    start = int(m["start"]) if m["start"] else None
    runs = []
    if m["param"] is None or m["spot"]:
        runs.append(({}, ""))
    if m["param"]:
        for v in m["vals"].split(","):
            runs.append(({m["param"]: v.strip()}, f"{m['param']}={v.strip()}: "))
    checks = []
    for vals, label in runs:
        # substitute in the text so that e.g. 0^p at p = 0 reads 0^0 = 1
        value = series_value(detect_series(parse(_subst(m["term"], vals)), start))
        checks.append(Check(label, value, parse(_subst(item.expected, vals))))
    return checks


def _fin_numerosity(item, order):
    res = full_numerosity(detect(parse(item.input)), order)
    return [Check("", finite_part(expand(res.full, 0)), parse(item.expected))]


def _numerosity_diff(item, order):
    first, second = (s.strip() for s in item.input.split(";"))
    n1 = full_numerosity(detect(parse(first)), order).full
    n2 = full_numerosity(detect(parse(second)), order).full
    return [Check("", canonicalize(n1 - n2), parse(item.expected))]


def _integers(item, order):
    return [Check("", N_INTEGERS, parse(item.expected))]


_KINDS = {
    "numerosity": _numerosity,
    "integrate": _integrate,
    "series": _series,
    "fin-numerosity": _fin_numerosity,
    "numerosity-diff": _numerosity_diff,
    "integers": _integers,
}


def compute(item: GoldenItem, order: int = DEFAULT_ORDER) -> list[Check]:
    try:
        fn = _KINDS[item.kind]
    except KeyError:
        raise ValueError(f"{item.id}: unknown kind {item.kind!r}") from None
    return fn(item, order)


def verify(item: GoldenItem, checks) -> tuple[bool, list]:
    """Compare every check symbolically and at randomized parameter values."""
    ok, details = True, []
    for c in checks:
        good, more = _compare(item.id, c.computed, c.expected, c.label)
        ok &= good
        details += more
    return ok, details


def run_item(item: GoldenItem, order: int = DEFAULT_ORDER) -> GoldenOutcome:
    t0 = time.perf_counter()
    checks = compute(item, order)
    ok, details = verify(item, checks)
    first = checks[0]
    if first.headline:
        shown = first.headline
    else:
        shown = " ; ".join(c.label + to_text(c.computed) for c in checks)
    env = make_envelope(item.input, first.computed, exact=first.exact, order=order,
                        headline=first.headline)
    return GoldenOutcome(item, bool(ok), shown, env, details, time.perf_counter() - t0)


def run_corpus(pattern: str | None = None, order: int = DEFAULT_ORDER) -> list[GoldenOutcome]:
    return [run_item(it, order) for it in select(load_corpus(), pattern)]
