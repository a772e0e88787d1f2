"""The result record printed by every CLI verb."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import sympy as sp

from .asymptotics import DEFAULT_ORDER, expand, split
from .errors import IncomparableMonomials, UnsupportedExpansion
from .expr import to_json, to_text


@dataclass
class ResultEnvelope:
    input_echo: str
    result: str
    parts: dict | None = None
    exact: bool = True
    diagnostics: list = field(default_factory=list)
    headline: str | None = None
    ast: dict | None = None
    table: list | None = None
    passed: bool | None = None

    def to_dict(self) -> dict:
        out = {
            "input_echo": self.input_echo,
            "result": self.result,
            "parts": self.parts,
            "exact": self.exact,
            "diagnostics": list(self.diagnostics),
        }
        if self.headline is not None:
            out["headline"] = self.headline
        if self.ast is not None:
            out["ast"] = self.ast
        if self.table is not None:
            out["table"] = self.table
        if self.passed is not None:
            out["passed"] = self.passed
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        rows = [("input", self.input_echo), ("result", self.headline or self.result)]
        if self.headline is not None:
            rows.append(("value", self.result))
        if self.parts is not None:
            rows += [(k, self.parts[k]) for k in ("infinite", "finite", "infinitesimal")]
        rows.append(("exact", "true" if self.exact else "false"))
        rows += [("note", d) for d in self.diagnostics]
        width = max(len(k) for k, _ in rows) + 2
        lines = [f"{k + ':':<{width}}{v}" for k, v in rows]
        if self.table:
            cols = list(self.table[0])
            cells = [[str(r[c]) for c in cols] for r in self.table]
            widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
            lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
            lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        return "\n".join(lines)


def surreal_parts(value: sp.Expr, order: int = DEFAULT_ORDER):
    """Texts of the infinite, finite and infinitesimal parts, plus diagnostics."""
    try:
        nf = expand(value, order)
        parts = split(nf)
    except (UnsupportedExpansion, IncomparableMonomials) as exc:
        return None, [f"no part decomposition: {exc}"]
    texts = {
        "infinite": to_text(parts.infinite.to_expr()),
        "finite": to_text(parts.finite),
        "infinitesimal": to_text(parts.infinitesimal.to_expr()),
    }
    notes = []
    if nf.truncated:
        notes.append(f"infinitesimal part truncated after {order} terms")
    return texts, notes


def make_envelope(input_echo: str, value: sp.Expr, *, exact: bool = True,
                  order: int = DEFAULT_ORDER, headline: str | None = None,
                  diagnostics=(), with_parts: bool = True) -> ResultEnvelope:
    parts, notes = surreal_parts(value, order) if with_parts else (None, [])
    return ResultEnvelope(
        input_echo=input_echo,
        result=to_text(value),
        parts=parts,
        exact=exact,
        diagnostics=list(diagnostics) + notes,
        headline=headline,
        ast=to_json(value),
    )
