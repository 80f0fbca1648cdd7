"""Test-side utilities kept independent of the code paths they check.

``parse_program`` reparses rendered Python-style source back into an AST
for round-trip checks. ``reference_metrics`` recomputes every rate with
straight-line arithmetic over plain verdict tuples, with none of the
package's aggregation machinery.
"""

from __future__ import annotations

import re

from flowbench import fragments
from flowbench.model import CountedBound, If, Loop, Return, Stmt

_DEF_RE = re.compile(r"def compute\(([^)]*)\):")
_FOR_RE = re.compile(r"for [a-z] in range\((\d+)\):")


def parse_program(source: str) -> tuple[tuple[str, ...], tuple[Stmt, ...]]:
    lines = [line for line in source.splitlines() if line.strip()]
    m = _DEF_RE.fullmatch(lines[0].strip())
    assert m, f"bad signature line: {lines[0]!r}"
    params = tuple(v.strip() for v in m.group(1).split(",") if v.strip())
    body, next_idx = _parse_block(lines, 1, 1)
    assert next_idx == len(lines), f"trailing lines from {lines[next_idx]!r}"
    return params, tuple(body)


def _indent_of(line: str) -> int:
    return (len(line) - len(line.lstrip())) // 4


def _parse_block(lines: list[str], idx: int, indent: int) -> tuple[list[Stmt], int]:
    stmts: list[Stmt] = []
    while idx < len(lines) and _indent_of(lines[idx]) == indent:
        text = lines[idx].strip()
        if text.startswith("if "):
            pred = fragments.parse_predicate(text[3:].rstrip(":"))
            then, idx = _parse_block(lines, idx + 1, indent + 1)
            orelse = None
            if idx < len(lines) and _indent_of(lines[idx]) == indent \
                    and lines[idx].strip() == "else:":
                block, idx = _parse_block(lines, idx + 1, indent + 1)
                orelse = tuple(block)
            stmts.append(If(pred, tuple(then), orelse))
        elif text.startswith("while "):
            bound = fragments.parse_predicate(text[6:].rstrip(":"))
            body, idx = _parse_block(lines, idx + 1, indent + 1)
            stmts.append(Loop(bound, tuple(body)))
        elif text.startswith("for "):
            m = _FOR_RE.fullmatch(text)
            assert m, f"bad for line: {text!r}"
            body, idx = _parse_block(lines, idx + 1, indent + 1)
            stmts.append(Loop(CountedBound(int(m.group(1))), tuple(body)))
        elif text.startswith("return "):
            stmts.append(Return(text[len("return "):].strip()))
            idx += 1
        else:
            stmts.append(fragments.parse_assign(text))
            idx += 1
    return stmts, idx


# --- independent metric arithmetic -------------------------------------------


def reference_metrics(
    rows: list[tuple[str, list[tuple[bool, bool]]]],
    complete_only: bool,
) -> dict:
    """Recompute all rates from (category, [(complete, correct)]) rows.

    Returns per-category programs/untestable/untestable_rate/avg_error/
    total_cases/avg_cases plus model-level totals, using nothing but loops
    and divisions.
    """
    categories: dict[str, dict] = {}
    model_total = 0
    model_complete = 0
    for category, cases in rows:
        bucket = categories.setdefault(
            category,
            {"programs": 0, "untestable": 0, "error_rates": [], "total_cases": 0},
        )
        bucket["programs"] += 1
        n_total = len(cases)
        n_complete = 0
        n_correct = 0
        for complete, correct in cases:
            if complete:
                n_complete += 1
            if correct:
                n_correct += 1
        bucket["total_cases"] += n_total
        model_total += n_total
        model_complete += n_complete
        if n_complete == 0:
            bucket["untestable"] += 1
        else:
            denom = n_complete if complete_only else n_total
            bucket["error_rates"].append((denom - n_correct) / denom)

    out: dict = {"categories": {}}
    for name, bucket in categories.items():
        rates = bucket["error_rates"]
        out["categories"][name] = {
            "programs": bucket["programs"],
            "untestable": bucket["untestable"],
            "untestable_rate": bucket["untestable"] / bucket["programs"],
            "avg_error_rate": sum(rates) / len(rates) if rates else None,
            "total_cases": bucket["total_cases"],
            "avg_cases": bucket["total_cases"] / bucket["programs"],
        }
    out["total_cases"] = model_total
    out["complete_cases"] = model_complete
    out["incomplete_rate"] = (
        (model_total - model_complete) / model_total if model_total else None
    )
    return out
