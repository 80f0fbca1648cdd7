"""Candidate statement sets that fill template holes.

Each entry pairs a placeholder kind with a payload (an assignment, a
predicate, or a counted loop bound), a complexity annotation, and goal
tags. The built-in catalog freezes the constants used throughout the
benchmark: 5 and 15 for x comparisons, 10 for y comparisons, additive and
multiplicative constants 10 and 7, and the fixed three-iteration bound.

Catalog files are UTF-8 JSON lines. The first line is a header record
``{"version": ...}``; every following line is one entry with fields
(id, placeholder, payload, tags, level) where ``payload`` is a source
fragment in the Python-style subset grammar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import fragments
from .errors import CatalogError, CatalogParseError, FragmentParseError
from .model import (
    Assign,
    BoolOp,
    Comparison,
    ComplexityLevel,
    CountedBound,
    Predicate,
    PlaceholderKind,
    expr_vars,
    pred_vars,
)
from .render import render_fragment

DEFAULT_CATALOG_VERSION = "builtin-1"

Payload = Assign | Predicate | CountedBound

_ASSIGN_KINDS = {
    PlaceholderKind.X_DEF: "x",
    PlaceholderKind.Y_DEF: "y",
    PlaceholderKind.X_C_USE: "x",
    PlaceholderKind.Y_C_USE: "y",
}
_DEF_KINDS = (PlaceholderKind.X_DEF, PlaceholderKind.Y_DEF)
_PRED_KINDS = {PlaceholderKind.X_P_USE: "x", PlaceholderKind.Y_P_USE: "y"}


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    placeholder: PlaceholderKind
    payload: Payload
    tags: frozenset[str]
    level: ComplexityLevel

    def payload_class(self) -> str:
        if isinstance(self.payload, Assign):
            return "assign"
        if isinstance(self.payload, CountedBound):
            return "counted-bound"
        return "predicate"


@dataclass(frozen=True)
class Catalog:
    entries: tuple[CatalogEntry, ...]
    version: str


def entry_issues(e: CatalogEntry) -> list[str]:
    """Why an entry's payload does not fit its placeholder kind, if it doesn't."""
    issues: list[str] = []
    kind = e.placeholder
    if kind in _ASSIGN_KINDS:
        if not isinstance(e.payload, Assign):
            issues.append(f"{e.id}: {kind.value} entry must be an assignment")
        else:
            target = _ASSIGN_KINDS[kind]
            if e.payload.var != target:
                issues.append(f"{e.id}: {kind.value} entry must assign {target}")
            reads = expr_vars(e.payload.expr)
            if kind in _DEF_KINDS and reads:
                issues.append(f"{e.id}: def entry must not read variables")
            if kind not in _DEF_KINDS and not reads:
                issues.append(f"{e.id}: c-use entry must read at least one variable")
    elif kind in _PRED_KINDS:
        if isinstance(e.payload, CountedBound):
            if kind is not PlaceholderKind.Y_P_USE:
                issues.append(f"{e.id}: counted bounds belong under {PlaceholderKind.Y_P_USE.value}")
        elif isinstance(e.payload, (Comparison, BoolOp)):
            if _PRED_KINDS[kind] not in pred_vars(e.payload):
                issues.append(f"{e.id}: {kind.value} predicate must use {_PRED_KINDS[kind]}")
        else:
            issues.append(f"{e.id}: {kind.value} entry must be a predicate or counted bound")
    elif kind is PlaceholderKind.COMPOUND_PREDICATE:
        if not isinstance(e.payload, BoolOp):
            issues.append(f"{e.id}: compound entry must combine two or more comparisons")
    else:
        issues.append(f"{e.id}: placeholder kind {kind.value} takes no catalog entries")
    return issues


def validate_catalog(c: Catalog) -> list[str]:
    issues: list[str] = []
    seen: set[str] = set()
    for e in c.entries:
        if e.id in seen:
            issues.append(f"duplicate entry id {e.id}")
        seen.add(e.id)
        issues.extend(entry_issues(e))
    return issues


_REL_SUFFIX = {"==": "eq", "!=": "ne", ">": "gt", ">=": "ge", "<": "lt", "<=": "le"}


def default_catalog() -> Catalog:
    """The built-in candidate sets; two calls return identical values."""
    entries: list[CatalogEntry] = []

    def add(id_: str, kind: PlaceholderKind, fragment: str, tags: set[str],
            level: ComplexityLevel = ComplexityLevel.LOW) -> None:
        if kind in _ASSIGN_KINDS:
            payload: Payload = fragments.parse_assign(fragment)
        elif kind is PlaceholderKind.Y_P_USE:
            payload = fragments.parse_loop_bound(fragment)
        else:
            payload = fragments.parse_predicate(fragment)
        entries.append(CatalogEntry(id_, kind, payload, frozenset(tags), level))

    add("xdef-05", PlaceholderKind.X_DEF, "x = 5", {"computation"})
    add("xdef-15", PlaceholderKind.X_DEF, "x = 15", {"computation"})
    add("ydef-07", PlaceholderKind.Y_DEF, "y = 7", {"computation"})
    add("ydef-10", PlaceholderKind.Y_DEF, "y = 10", {"computation"})

    add("xcuse-add10", PlaceholderKind.X_C_USE, "x = x + 10", {"computation"})
    add("xcuse-mul7", PlaceholderKind.X_C_USE, "x = x * 7", {"computation"})
    add("xcuse-sub7", PlaceholderKind.X_C_USE, "x = x - 7", {"computation"})
    add("xcuse-xy-add10", PlaceholderKind.X_C_USE, "x = x + y + 10", {"computation"})
    add("xcuse-xy-sub7", PlaceholderKind.X_C_USE, "x = x + y - 7", {"computation"})
    add("ycuse-add7", PlaceholderKind.Y_C_USE, "y = y + 7", {"computation"})
    add("ycuse-sub7", PlaceholderKind.Y_C_USE, "y = y - 7", {"computation"})

    for const in ("5", "15"):
        for op, suffix in _REL_SUFFIX.items():
            add(f"xpuse-{int(const):02d}-{suffix}", PlaceholderKind.X_P_USE,
                f"x {op} {const}", {"boundary"})
    for op, suffix in _REL_SUFFIX.items():
        add(f"ypuse-10-{suffix}", PlaceholderKind.Y_P_USE,
            f"y {op} 10", {"boundary", "iteration"})

    # Predicates that fold a computation into the comparison sit behind the
    # Mid complexity gate.
    add("xpuse-even", PlaceholderKind.X_P_USE, "x % 2 == 0",
        {"boundary", "computation"}, ComplexityLevel.MID)
    add("xpuse-sum-gt05", PlaceholderKind.X_P_USE, "x + y > 5",
        {"boundary", "computation"}, ComplexityLevel.MID)

    add("loop-count-3", PlaceholderKind.Y_P_USE, "3", {"iteration"})

    for joiner in ("and", "or"):
        for op, suffix in _REL_SUFFIX.items():
            add(f"comp-{joiner}-{suffix}", PlaceholderKind.COMPOUND_PREDICATE,
                f"x {op} 5 {joiner} y {op} 10", {"boundary"}, ComplexityLevel.MID)

    catalog = Catalog(entries=tuple(entries), version=DEFAULT_CATALOG_VERSION)
    issues = validate_catalog(catalog)
    if issues:  # would be a bug in the table above
        raise CatalogError("; ".join(issues))
    return catalog


def candidates_for(
    c: Catalog,
    kind: PlaceholderKind | str,
    max_level: ComplexityLevel = ComplexityLevel.HIGH,
) -> list[CatalogEntry]:
    """Entries of one placeholder kind at or below a complexity level,
    stably ordered by entry id."""
    if isinstance(kind, str):
        try:
            kind = PlaceholderKind(kind)
        except ValueError:
            raise CatalogError(f"unknown placeholder kind {kind!r}") from None
    if not isinstance(kind, PlaceholderKind):
        raise CatalogError(f"unknown placeholder kind {kind!r}")
    matches = [e for e in c.entries if e.placeholder is kind and e.level <= max_level]
    return sorted(matches, key=lambda e: e.id)


# --- file round trip ---------------------------------------------------------


def save_catalog(c: Catalog, path: str | Path) -> None:
    path = Path(path)
    lines = [json.dumps({"version": c.version}, sort_keys=True)]
    for e in c.entries:
        lines.append(
            json.dumps(
                {
                    "id": e.id,
                    "placeholder": e.placeholder.value,
                    "payload": render_fragment(e.payload),
                    "tags": sorted(e.tags),
                    "level": e.level.label,
                },
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_catalog(path: str | Path) -> Catalog:
    path = Path(path)
    try:
        raw_lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CatalogParseError(f"cannot read catalog {path}: {exc}") from exc
    if not raw_lines:
        raise CatalogParseError("catalog file is empty", line=1)

    version = None
    entries: list[CatalogEntry] = []
    for lineno, raw in enumerate(raw_lines, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CatalogParseError(
                f"line {lineno}, column {exc.colno}: invalid JSON ({exc.msg})", line=lineno
            ) from exc
        if lineno == 1 and "version" in record and "id" not in record:
            version = record["version"]
            continue
        entries.append(_parse_entry(record, lineno))

    if version is None:
        raise CatalogParseError("catalog file is missing its version header", line=1)
    catalog = Catalog(entries=tuple(entries), version=version)
    issues = validate_catalog(catalog)
    if issues:
        raise CatalogError("invalid catalog: " + "; ".join(issues))
    return catalog


def _parse_entry(record: dict, lineno: int) -> CatalogEntry:
    try:
        entry_id = record["id"]
        kind = PlaceholderKind(record["placeholder"])
        fragment = record["payload"]
        tags = frozenset(record.get("tags", []))
        level = ComplexityLevel.from_label(record.get("level", "Low"))
    except (KeyError, ValueError) as exc:
        raise CatalogParseError(
            f"line {lineno}: bad entry record ({exc})", line=lineno,
            entry_id=record.get("id"),
        ) from exc
    try:
        if kind in _ASSIGN_KINDS:
            payload: Payload = fragments.parse_assign(fragment)
        elif kind is PlaceholderKind.Y_P_USE:
            payload = fragments.parse_loop_bound(fragment)
        else:
            payload = fragments.parse_predicate(fragment)
    except FragmentParseError as exc:
        col = (exc.pos + 1) if exc.pos is not None else "?"
        raise CatalogParseError(
            f"line {lineno}, column {col}: entry {entry_id!r}: {exc}",
            line=lineno,
            entry_id=entry_id,
        ) from exc
    return CatalogEntry(entry_id, kind, payload, tags, level)
