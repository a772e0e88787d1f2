"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line in RESULTS; conftest prints them at the end
of the session.  Run directly with ``python3 tests/test_acceptance.py``.
"""

import functools
import random
import sys
import time

import mpmath
import pytest
import sympy as sp

from surreal_calc import golden
from surreal_calc.asymptotics import (asymptotic_inverse, expand, expand_to_series,
                                      expansion_residual, split)
from surreal_calc.calculus import (SurrealFunction, derive, integrate_constant_over_set,
                                   integrate_surreal_function, numerosity_via_delta)
from surreal_calc.divergent import detect_series, partial_sum_closed_form
from surreal_calc.expr import OMEGA, OMEGA1, canonicalize, equivalent, eval_numeric, parse, var
from surreal_calc.numerosity import (N_INTEGERS, count_elements, detect, full_numerosity,
                                     interval_numerosity, parse_interval,
                                     sequence_from_numerosity)
from surreal_calc.series_engine import growth_cmp, growth_mul

from randexpr import basis_expression, supported_growth

RESULTS: list[str] = []
k = var("k")


def criterion(label):
    """Record PASS/FAIL for ``label`` whatever way the test ends."""
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                note = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS.append(f"FAIL  {label}  ({type(exc).__name__}: {str(exc)[:120]})")
                raise
            elapsed = time.perf_counter() - t0
            RESULTS.append(f"PASS  {label}  ({note or f'{elapsed:.2f} s'})")
        return run
    return wrap


def _corpus_group(group):
    items = [it for it in golden.load_corpus() if it.group == group]
    t0 = time.perf_counter()
    computed = [(it, golden.compute(it)) for it in items]
    elapsed = time.perf_counter() - t0
    bad = []
    for it, checks in computed:
        ok, details = golden.verify(it, checks)
        if not ok:
            bad.append(f"{it.id}: {details}")
    assert not bad, bad
    assert elapsed < 1.0, f"kernels took {elapsed:.2f} s"
    return f"{len(items)} identities, kernels {elapsed:.2f} s"


@criterion("1 numerosity identities")
def test_c1_numerosity_identities():
    return _corpus_group("N")


@criterion("2 antiderivative identities")
def test_c2_antiderivative_identities():
    return _corpus_group("I")


@criterion("3 divergent series identities")
def test_c3_divergent_series_identities():
    return _corpus_group("D")


@criterion("4 ln(w) roundtrip")
def test_c4_log_roundtrip():
    s = sequence_from_numerosity(sp.log(OMEGA))
    assert equivalent(s.body, sp.exp(k + 1) - sp.exp(k))
    assert full_numerosity(s).full == sp.log(OMEGA)


@criterion("5 finite-part constants")
def test_c5_constants():
    fin = split(expand(full_numerosity(detect(k + 1)).full, 0)).finite
    assert fin == sp.Rational(-1, 2)
    odd, even = full_numerosity(detect(2 * k + 1)).full, full_numerosity(detect(2 * k + 2)).full
    assert canonicalize(odd - even) == sp.S.Half
    assert N_INTEGERS == 2 * OMEGA


@criterion("6 linearity violation")
def test_c6_linearity_violation():
    # w*u is w on the single point {0} and 0 elsewhere, so only the point contributes
    point = interval_numerosity(parse_interval("[0,0]"))
    assert integrate_constant_over_set(OMEGA, point) == sp.pi
    # u is finite and vanishes off a point, so its integral over [-1, 1] is 0
    x = var("x")
    assert OMEGA * integrate_surreal_function(SurrealFunction(sp.S.Zero, x), -1, 1) == 0


@criterion("7 delta coherence")
def test_c7_delta_coherence():
    corpus = [full_numerosity(detect(parse(t))).full
              for t in ("k+1", "2*k", "2*k+1", "a*k+b", "k^2", "1/3+k+k^2", "k^4", "a^k")]
    corpus += [interval_numerosity(parse_interval(t))
               for t in ("[0,1)", "[0,1]", "(0,1)", "<0,1]", "[0,w)", "(-w,w)", "[2,2]")]
    corpus += [N_INTEGERS, OMEGA - sp.S.Half, OMEGA * OMEGA1 + 1]
    for n in corpus:
        assert numerosity_via_delta(n) == canonicalize(n), n
    via_unit = numerosity_via_delta(interval_numerosity(parse_interval("[0,1)")))
    via_log = canonicalize(integrate_constant_over_set(
        sp.log(OMEGA), interval_numerosity(parse_interval("[0,w)"))) / sp.pi)
    assert via_unit == via_log == OMEGA1
    return f"{len(corpus)} numerosities"


# --- property suites ---------------------------------------------------------

SUITE_LIMIT = 30.0
CUTOFFS = (10**3, 10**4, 10**5, 10**6)
ORACLE_SEQUENCES = [
    ("k+1", {}), ("2*k", {}), ("2*k+1", {}), ("a*k+b", {"a": 3, "b": 7}),
    ("a*k+b", {"a": sp.Rational(1, 2), "b": 5}), ("k^2", {}), ("1/3+k+k^2", {}),
    ("k^4", {}), ("a^k", {"a": 2}), ("a^k", {"a": 3}),
]


def _timed(fn):
    t0 = time.perf_counter()
    note = fn()
    elapsed = time.perf_counter() - t0
    assert elapsed < SUITE_LIMIT, f"suite took {elapsed:.1f} s"
    return f"{note}, {elapsed:.1f} s"


@criterion("8a oracle vs germ")
def test_c8a_oracle_agreement():
    def suite():
        n = 0
        for text, bind in ORACLE_SEQUENCES:
            seq = detect(parse(text, bind))
            full = full_numerosity(seq).full
            for x in CUTOFFS:
                germ = eval_numeric(full, {OMEGA: x}, 40)
                assert abs(germ - count_elements(seq, x)) <= 1, (text, bind, x)
                n += 1
        for x in CUTOFFS:
            # integers in [-x, x]
            assert abs(eval_numeric(N_INTEGERS, {OMEGA: x}, 40) - (2 * x + 1)) <= 1
            n += 1
        return f"{n} comparisons"
    return _timed(suite)


@criterion("8b residue-class additivity")
def test_c8b_residue_classes():
    def suite():
        whole = full_numerosity(detect(k)).full
        for m in range(2, 6):
            parts = [full_numerosity(detect(m * k + r)).full for r in range(m)]
            assert equivalent(sp.Add(*parts), whole), m
        return "moduli 2..5"
    return _timed(suite)


@criterion("8c Leibniz and additivity of the derivation")
def test_c8c_derivation():
    def suite():
        for seed in range(200):
            r = random.Random(seed)
            a, b = basis_expression(r), basis_expression(r)
            assert equivalent(derive(a * b), derive(a) * b + a * derive(b)), seed
            assert equivalent(derive(a + b), derive(a) + derive(b)), seed
        return "200 pairs"
    return _timed(suite)


def _residual_is_small(g, order=2):
    inv = asymptotic_inverse(g, order, k)
    last = expand(inv, order).terms[-1]
    res = expansion_residual(g, inv, order, k)
    gp = expand_to_series(sp.diff(g, k).subs(k, inv), 0).lead()[0]
    bound = growth_mul(gp.growth, last.key.growth)
    top = res.lead()[0].growth if res.terms else res.bound
    return top is None or growth_cmp(top, bound) < 0


@criterion("8d inversion residuals")
def test_c8d_inversion():
    def suite():
        r = random.Random(8)
        for _ in range(50):
            g = supported_growth(r, k)
            assert _residual_is_small(g), g
        return "50 functions"
    return _timed(suite)


SUMMED = ["1", "k", "k^2", "k^3", "k^2+3*k-1", "2^k", "3^k", "(1/2)^k", "ln(k)", "1/k", "psi(k)"]


def _value(e, name, n):
    if e.free_symbols:
        return eval_numeric(e, {name: n}, 45)
    return mpmath.mpf(sp.N(e, 45))


@criterion("8e partial sums vs direct summation")
def test_c8e_partial_sums():
    def suite():
        n = 0
        with mpmath.workdps(45):
            for text in SUMMED:
                term = detect_series(parse(text), 1)
                S = partial_sum_closed_form(term)
                running = mpmath.mpf(0)
                for t in range(S.start, S.start + 50):
                    got = _value(S.S, "t", t)
                    assert abs(got - running) <= mpmath.mpf(10) ** -25 * max(1, abs(running)), (text, t)
                    running += _value(term.body, "k", t)
                    n += 1
        return f"{n} points"
    return _timed(suite)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
