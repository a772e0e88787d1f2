"""Command-line front end: ``surreal-calc <verb> ...``.

Exit codes: 0 success, 1 internal failure or golden mismatch, 2 parse or
usage error, 3 unsupported input, 4 divergence-class error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath
import sympy as sp

from . import golden
from .asymptotics import DEFAULT_ORDER
from .calculus import (SurrealFunction, delta, delta_power, derive,
                       integrate_surreal_function)
from .divergent import detect_series, partial_sum_closed_form, series_value
from .envelope import ResultEnvelope, make_envelope
from .errors import DivergenceError, ParseError, SurrealCalcError, UnsupportedError
from .expr import OMEGA, default_precision, eval_numeric, parse, to_text, var
from .numerosity import (count_elements, detect, full_numerosity, interval_numerosity,
                         parse_interval, sequence_from_numerosity)


class UsageError(Exception):
    pass


def _bindings(args) -> dict:
    out = {}
    for item in args.bind or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--bind expects name=value, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def _parse(text: str, args):
    return parse(text, _bindings(args))


# ---------------------------------------------------------------------------
# verbs


def cmd_numerosity(args) -> ResultEnvelope:
    res = full_numerosity(detect(_parse(args.term, args)), args.order)
    headline = f"full: {to_text(res.full)} | refined: {res.refined}"
    notes = [] if res.exact else ["no closed-form inverse; full value is the asymptotic inverse"]
    return make_envelope(args.term, res.full, exact=res.exact, order=args.order,
                         headline=headline, diagnostics=notes)


def cmd_sequence(args) -> ResultEnvelope:
    s = sequence_from_numerosity(_parse(args.numerosity, args))
    env = make_envelope(args.numerosity, s.body, with_parts=False,
                        diagnostics=[f"terms start at k = {s.start}", f"sequence class: {s.kind}"])
    return env


def cmd_interval(args) -> ResultEnvelope:
    try:
        iv = parse_interval(args.interval)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return make_envelope(args.interval, interval_numerosity(iv), order=args.order)


def cmd_integrate(args) -> ResultEnvelope:
    x = var(args.var)
    F = SurrealFunction(_parse(args.function, args), x)
    value = integrate_surreal_function(F, _parse(args.lower, args), _parse(args.upper, args))
    echo = f"{args.function} d{args.var} over [{args.lower}, {args.upper}]"
    return make_envelope(echo, value, order=args.order)


def cmd_series(args) -> ResultEnvelope:
    term = detect_series(_parse(args.term, args), args.start)
    value = series_value(term)
    S = partial_sum_closed_form(term)
    notes = [f"partial sums S(t) = {to_text(S.S)}", S.uniqueness_note]
    return make_envelope(args.term, value, order=args.order, diagnostics=notes)


def cmd_delta(args) -> ResultEnvelope:
    if args.power is not None:
        value = delta_power(_parse(args.power, args))
        echo = f"delta(0)^({args.power})"
    else:
        value = delta(_parse(args.point, args))
        echo = f"delta({args.point})"
    return make_envelope(echo, value, order=args.order)


def cmd_derive(args) -> ResultEnvelope:
    return make_envelope(args.expr, derive(_parse(args.expr, args)), order=args.order)


def cmd_simplify(args) -> ResultEnvelope:
    return make_envelope(args.expr, _parse(args.expr, args), order=args.order)


def _cutoff(text: str) -> sp.Rational:
    try:
        return sp.Rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        value = parse(text)
        if not value.is_Rational:
            raise UsageError(f"cutoff {text!r} is not a rational number") from None
        return value


def cmd_oracle_check(args) -> ResultEnvelope:
    seq = detect(_parse(args.term, args))
    res = full_numerosity(seq, args.order)
    rows, ok = [], True
    for text in args.cutoffs.split(","):
        x = _cutoff(text.strip())
        count = count_elements(seq, x)
        germ = eval_numeric(res.full, {OMEGA: x}, args.precision)
        diff = abs(germ - count)
        ok &= diff <= 1
        rows.append({
            "cutoff": str(x),
            "count": count,
            "germ": mpmath.nstr(germ, 15),
            "diff": mpmath.nstr(diff, 6),
        })
    env = make_envelope(args.term, res.full, exact=res.exact, order=args.order,
                        diagnostics=["pass: every |count - germ| <= 1" if ok
                                     else "FAIL: some |count - germ| > 1"])
    env.table = rows
    env.passed = ok
    return env


def cmd_golden(args):
    items = golden.select(golden.load_corpus(), args.filter)
    if not items:
        raise UsageError(f"no golden identity matches {args.filter!r}")
    return [golden.run_item(it, args.order) for it in items]


def _golden_output(outcomes, as_json: bool) -> tuple[str, int]:
    passed = sum(o.passed for o in outcomes)
    code = 0 if passed == len(outcomes) else 1
    if as_json:
        doc = {
            "passed": passed,
            "total": len(outcomes),
            "items": [{
                "id": o.item.id,
                "kind": o.item.kind,
                "input": o.item.input,
                "expected": o.item.expected,
                "computed": o.computed,
                "passed": o.passed,
                "details": o.details,
                "envelope": o.envelope.to_dict() if o.envelope else None,
            } for o in outcomes],
        }
        return json.dumps(doc, sort_keys=True), code
    width = max(len(o.item.id) for o in outcomes)
    lines = [f"{'PASS' if o.passed else 'FAIL'}  {o.item.id:<{width}}  {o.item.input}  =>  {o.computed}"
             for o in outcomes]
    for o in outcomes:
        if not o.passed:
            lines += [f"      {o.item.id}: {d}" for d in o.details]
    idents = [o for o in outcomes if o.item.group != "F"]
    consts = [o for o in outcomes if o.item.group == "F"]
    summary = []
    if idents:
        summary.append(f"identities {sum(o.passed for o in idents)}/{len(idents)} pass")
    if consts:
        summary.append(f"finite-part constants {sum(o.passed for o in consts)}/{len(consts)} pass")
    lines.append("; ".join(summary))
    return "\n".join(lines), code


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=DEFAULT_ORDER,
                        help="number of infinitesimal terms kept in expansions (default 2)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of aligned text")
    common.add_argument("--precision", type=int, default=None,
                        help="significant digits for numeric evaluation "
                             "(default 30, or SURREAL_CALC_PRECISION)")
    common.add_argument("--bind", action="append", metavar="NAME=VALUE",
                        help="substitute a value for a free parameter (repeatable)")

    parser = argparse.ArgumentParser(prog="surreal-calc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    p = sub.add_parser("numerosity", parents=[common], help="numerosity of {a_k : k >= 0}")
    p.add_argument("term", help="sequence term in k, e.g. 'k^2'")
    p.set_defaults(handler=cmd_numerosity)

    p = sub.add_parser("sequence", parents=[common], help="a sequence with a given numerosity")
    p.add_argument("numerosity", help="expression in w, e.g. 'ln(w)'")
    p.set_defaults(handler=cmd_sequence)

    p = sub.add_parser("interval", parents=[common], help="numerosity of a real interval")
    p.add_argument("interval", help="e.g. '[0,1)', '<0,1]', '[0,inf)'")
    p.set_defaults(handler=cmd_interval)

    p = sub.add_parser("integrate", parents=[common], help="integral of a surreal function")
    p.add_argument("function", help="body in the integration variable, e.g. 'w^x'")
    p.add_argument("--var", default="x", help="integration variable (default x)")
    p.add_argument("--lower", default="0", help="lower bound (default 0)")
    p.add_argument("--upper", required=True, help="upper bound")
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser("series", parents=[common], help="surreal value of a divergent series")
    p.add_argument("term", help="series term in k")
    p.add_argument("--from", dest="start", type=int, default=None,
                   help="first index (default 0, or 1 where a_0 is undefined)")
    p.set_defaults(handler=cmd_series)

    p = sub.add_parser("delta", parents=[common], help="surreal delta at a point, or delta(0)^p")
    p.add_argument("point", nargs="?", default="0")
    p.add_argument("--power", default=None, help="positive rational power of delta(0)")
    p.set_defaults(handler=cmd_delta)

    p = sub.add_parser("derive", parents=[common], help="apply the surreal derivation")
    p.add_argument("expr")
    p.set_defaults(handler=cmd_derive)

    p = sub.add_parser("simplify", parents=[common], help="canonical form and surreal parts")
    p.add_argument("expr")
    p.set_defaults(handler=cmd_simplify)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare element counts with the numerosity germ")
    p.add_argument("term")
    p.add_argument("--cutoffs", default="1000,1000000", help="comma-separated rational cutoffs")
    p.set_defaults(handler=cmd_oracle_check)

    p = sub.add_parser("golden", parents=[common], help="run the golden identity corpus")
    p.add_argument("filter", nargs="?", default=None, help="group (numerosity, integrals, series, constants), prefix (N, I, D, F) or id (N.6)")
    p.set_defaults(handler=cmd_golden)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.precision is None:
        args.precision = default_precision()
    out, err = sys.stdout, sys.stderr
    try:
        result = args.handler(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except UnsupportedError as exc:
        print(f"error: {exc}", file=err)
        return 3
    except DivergenceError as exc:
        print(f"error: {exc}", file=err)
        return 4
    except SurrealCalcError as exc:
        print(f"error: {exc}", file=err)
        return 3
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return 1
    if args.verb == "golden":
        text, code = _golden_output(result, args.json)
        print(text, file=out)
        return code
    print(result.to_json() if args.json else result.to_text(), file=out)
    return 1 if result.passed is False else 0


if __name__ == "__main__":
    sys.exit(main())
