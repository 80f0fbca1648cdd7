"""Abstract program representation.

A program is a small integer function over the variables ``x`` and ``y``:
a flat parameter list, a statement tree built from assignments, branches
and loops, and a single trailing return. Programs are immutable values;
everything downstream (rendering, interpretation, metrics) treats them as
plain data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import InvalidProgramError

VARIABLES = ("x", "y")

ARITH_OPS = ("+", "-", "*", "%")
RELOPS = ("==", "!=", ">", "<", ">=", "<=")
BOOL_OPS = ("and", "or")

MAX_EXPR_DEPTH = 4


class StructureCategory(enum.Enum):
    """The seven control-flow structures a program can be built from."""

    SEQUENCE = "Sequence"
    BRANCH = "Branch"
    LOOP = "Loop"
    NESTED_LOOP = "NestedLoop"
    SEQUENTIAL_BRANCH = "SequentialBranch"
    SEQUENTIAL_BRANCH_WITH_ELSE = "SequentialBranchWithElse"
    SEQUENTIAL_LOOP = "SequentialLoop"

    @property
    def display_name(self) -> str:
        names = {
            StructureCategory.SEQUENCE: "Sequence",
            StructureCategory.BRANCH: "Branch",
            StructureCategory.LOOP: "Loop",
            StructureCategory.NESTED_LOOP: "Nested Loop",
            StructureCategory.SEQUENTIAL_BRANCH: "Sequential Branch",
            StructureCategory.SEQUENTIAL_BRANCH_WITH_ELSE: "Sequential Branch with Else",
            StructureCategory.SEQUENTIAL_LOOP: "Sequential Loop",
        }
        return names[self]


class PlaceholderKind(enum.Enum):
    """Kinds of template holes, named after the variable-usage role they fill."""

    X_DEF = "xdef"
    Y_DEF = "ydef"
    X_C_USE = "xcuse"
    Y_C_USE = "ycuse"
    X_P_USE = "xpuse"
    Y_P_USE = "ypuse"
    COMPOUND_PREDICATE = "compound"
    PROMPT_MARKER = "prompt"


class ComplexityLevel(enum.IntEnum):
    """Ordered complexity scale; higher values dominate when rules combine."""

    LOW = 1
    LOW_MID = 2
    MID = 3
    MID_HIGH = 4
    HIGH = 5

    @property
    def label(self) -> str:
        return _LEVEL_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "ComplexityLevel":
        for level, name in _LEVEL_LABELS.items():
            if name == label:
                return level
        raise ValueError(f"unknown complexity level {label!r}")


_LEVEL_LABELS = {
    ComplexityLevel.LOW: "Low",
    ComplexityLevel.LOW_MID: "LowMid",
    ComplexityLevel.MID: "Mid",
    ComplexityLevel.MID_HIGH: "MidHigh",
    ComplexityLevel.HIGH: "High",
}


# --- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Var | Lit | BinOp


# --- predicates -------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class BoolVar:
    """Bare boolean variable reference; representable but absent from the
    default catalog, which is integer-only."""

    name: str


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    parts: tuple["Predicate", ...]


Predicate = Comparison | BoolVar | BoolOp


# --- statements -------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class CountedBound:
    """Loop bound that runs the body a fixed number of times."""

    count: int


@dataclass(frozen=True)
class If:
    pred: Predicate
    then: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] | None = None


@dataclass(frozen=True)
class Loop:
    bound: Predicate | CountedBound
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class Return:
    var: str


Stmt = Assign | If | Loop | Return

LoopBound = Predicate | CountedBound


@dataclass(frozen=True)
class ProgramSpec:
    """A generated program plus its provenance.

    ``binding`` records which catalog entry filled each template hole, as
    (hole name, entry id) pairs sorted by hole name. ``id`` is a stable
    digest of (category, binding): equal inputs always give equal ids.
    """

    id: str
    category: StructureCategory
    params: tuple[str, ...]
    body: tuple[Stmt, ...]
    binding: tuple[tuple[str, str], ...] = ()
    complexity: ComplexityLevel = field(default=ComplexityLevel.LOW)

    def binding_map(self) -> dict[str, str]:
        return dict(self.binding)


# --- structural helpers -----------------------------------------------------


def expr_depth(e: Expr) -> int:
    if isinstance(e, BinOp):
        return 1 + max(expr_depth(e.left), expr_depth(e.right))
    return 1


def expr_vars(e: Expr) -> set[str]:
    match e:
        case Var(name):
            return {name}
        case Lit(_):
            return set()
        case BinOp(_, left, right):
            return expr_vars(left) | expr_vars(right)
    raise TypeError(f"not an expression: {e!r}")


def expr_has_computation(e: Expr) -> bool:
    return isinstance(e, BinOp)


def pred_vars(p: Predicate) -> set[str]:
    match p:
        case Comparison(_, left, right):
            return expr_vars(left) | expr_vars(right)
        case BoolVar(name):
            return {name}
        case BoolOp(_, parts):
            out: set[str] = set()
            for part in parts:
                out |= pred_vars(part)
            return out
    raise TypeError(f"not a predicate: {p!r}")


def iter_statements(body: tuple[Stmt, ...]):
    """Yield every statement in the tree, depth-first."""
    for s in body:
        yield s
        if isinstance(s, If):
            yield from iter_statements(s.then)
            if s.orelse is not None:
                yield from iter_statements(s.orelse)
        elif isinstance(s, Loop):
            yield from iter_statements(s.body)


def iter_predicates(body: tuple[Stmt, ...]):
    """Yield every branch/loop predicate in the tree (counted bounds excluded)."""
    for s in iter_statements(body):
        if isinstance(s, If):
            yield s.pred
        elif isinstance(s, Loop) and not isinstance(s.bound, CountedBound):
            yield s.bound


def assigned_vars(body: tuple[Stmt, ...]) -> set[str]:
    return {s.var for s in iter_statements(body) if isinstance(s, Assign)}


# --- validation -------------------------------------------------------------


def validate_program(p: ProgramSpec) -> list[str]:
    """Check the ProgramSpec invariants; returns violations, empty if valid."""
    issues: list[str] = []

    allowed_order = [v for v in VARIABLES if v in p.params]
    if list(p.params) != allowed_order or len(set(p.params)) != len(p.params):
        issues.append(f"parameters must be an ordered subset of {VARIABLES}, got {p.params}")

    if not p.body:
        issues.append("missing return (empty body)")
        return issues

    returns = [s for s in iter_statements(p.body) if isinstance(s, Return)]
    if not returns:
        issues.append("missing return")
    elif len(returns) > 1:
        issues.append(f"expected exactly one return, found {len(returns)}")
    elif not isinstance(p.body[-1], Return):
        issues.append("return must be the final statement")

    issues.extend(_check_structure(p.body))
    _check_definite_assignment(p.body, set(p.params), issues)

    if not issues and p.complexity != classify_complexity(p):
        issues.append(
            f"stored complexity {p.complexity.label} does not match "
            f"classifier result {classify_complexity(p).label}"
        )
    return issues


def _check_structure(body: tuple[Stmt, ...]) -> list[str]:
    issues: list[str] = []
    for s in iter_statements(body):
        match s:
            case Assign(var, expr):
                if var not in VARIABLES:
                    issues.append(f"assignment to unknown variable {var}")
                issues.extend(_check_expr(expr))
            case If(pred, _, _):
                issues.extend(_check_pred(pred))
            case Loop(bound, _):
                if isinstance(bound, CountedBound):
                    if bound.count < 1:
                        issues.append(f"counted loop bound must be positive, got {bound.count}")
                else:
                    issues.extend(_check_pred(bound))
            case Return(var):
                if var not in VARIABLES:
                    issues.append(f"return of unknown variable {var}")
            case _:
                issues.append(f"unknown statement type {type(s).__name__}")
    return issues


def _check_expr(e: Expr) -> list[str]:
    issues = []
    if expr_depth(e) > MAX_EXPR_DEPTH:
        issues.append(f"expression deeper than {MAX_EXPR_DEPTH} levels")
    for node in _walk_expr(e):
        if isinstance(node, BinOp) and node.op not in ARITH_OPS:
            issues.append(f"unknown arithmetic operator {node.op!r}")
        if isinstance(node, Lit) and not isinstance(node.value, int):
            issues.append(f"non-integer literal {node.value!r}")
    return issues


def _walk_expr(e: Expr):
    yield e
    if isinstance(e, BinOp):
        yield from _walk_expr(e.left)
        yield from _walk_expr(e.right)


def _check_pred(p: Predicate) -> list[str]:
    issues = []
    match p:
        case Comparison(op, left, right):
            if op not in RELOPS:
                issues.append(f"unknown relational operator {op!r}")
            issues.extend(_check_expr(left))
            issues.extend(_check_expr(right))
        case BoolVar(_):
            pass
        case BoolOp(op, parts):
            if op not in BOOL_OPS:
                issues.append(f"unknown logical operator {op!r}")
            if len(parts) < 2:
                issues.append("compound predicate needs at least two members")
            for part in parts:
                issues.extend(_check_pred(part))
    return issues


def _check_definite_assignment(
    body: tuple[Stmt, ...], defined: set[str], issues: list[str]
) -> set[str]:
    """Flow-sensitive read-before-def check.

    Branch arms and loop bodies may not execute, so a variable counts as
    defined after an if only when both arms assign it, and never from a
    loop body alone.
    """
    for s in body:
        match s:
            case Assign(var, expr):
                for v in sorted(expr_vars(expr) - defined):
                    issues.append(f"unbound variable {v}")
                defined = defined | {var}
            case If(pred, then, orelse):
                for v in sorted(pred_vars(pred) - defined):
                    issues.append(f"unbound variable {v}")
                then_defs = _check_definite_assignment(then, set(defined), issues)
                if orelse is not None:
                    else_defs = _check_definite_assignment(orelse, set(defined), issues)
                    defined = defined | (then_defs & else_defs)
            case Loop(bound, loop_body):
                if not isinstance(bound, CountedBound):
                    for v in sorted(pred_vars(bound) - defined):
                        issues.append(f"unbound variable {v}")
                _check_definite_assignment(loop_body, set(defined), issues)
            case Return(var):
                if var not in defined:
                    issues.append(f"unbound variable {var}")
    return defined


# --- complexity -------------------------------------------------------------


def classify_complexity(p: ProgramSpec) -> ComplexityLevel:
    """Classify a program on the five-step complexity scale.

    Each rule below contributes a level and the maximum wins: predicate
    shape, number of arithmetic computations, number of basic structures,
    and how multiple structures combine (sequential vs nested). Computation
    type and datatype rules always score Low here because the model is
    restricted to integer +, -, *, % by construction.
    """
    structural = _check_structure(p.body)
    if structural:
        raise InvalidProgramError("; ".join(structural))

    levels = [ComplexityLevel.LOW]
    for pred in iter_predicates(p.body):
        levels.append(_predicate_level(pred))
    levels.append(_computation_count_level(p.body))
    levels.append(_structure_count_level(p.body))
    levels.append(_formation_level(p.body))
    return max(levels)


def _predicate_level(pred: Predicate) -> ComplexityLevel:
    match pred:
        case Comparison(_, left, right):
            if expr_has_computation(left) or expr_has_computation(right):
                return ComplexityLevel.MID
            return ComplexityLevel.LOW
        case BoolVar(_):
            return ComplexityLevel.LOW
        case BoolOp(_, parts):
            has_comp = any(
                isinstance(m, Comparison)
                and (expr_has_computation(m.left) or expr_has_computation(m.right))
                for m in parts
            )
            if len(parts) == 2:
                return ComplexityLevel.MID_HIGH if has_comp else ComplexityLevel.MID
            return ComplexityLevel.HIGH if has_comp else ComplexityLevel.MID_HIGH
    raise TypeError(f"not a predicate: {pred!r}")


def _computation_count_level(body: tuple[Stmt, ...]) -> ComplexityLevel:
    count = sum(
        1
        for s in iter_statements(body)
        if isinstance(s, Assign) and expr_has_computation(s.expr)
    )
    return ComplexityLevel.MID_HIGH if count > 3 else ComplexityLevel.LOW


def _count_structures(body: tuple[Stmt, ...]) -> int:
    return sum(1 for s in iter_statements(body) if isinstance(s, (If, Loop)))


def _structure_count_level(body: tuple[Stmt, ...]) -> ComplexityLevel:
    n = _count_structures(body)
    if n <= 1:
        return ComplexityLevel.LOW
    if n == 2:
        return ComplexityLevel.LOW_MID
    return ComplexityLevel.MID_HIGH


def _formation_level(body: tuple[Stmt, ...]) -> ComplexityLevel:
    if _count_structures(body) <= 1:
        return ComplexityLevel.LOW

    def has_nesting(stmts: tuple[Stmt, ...]) -> bool:
        for s in stmts:
            blocks: list[tuple[Stmt, ...]] = []
            if isinstance(s, If):
                blocks.append(s.then)
                if s.orelse is not None:
                    blocks.append(s.orelse)
            elif isinstance(s, Loop):
                blocks.append(s.body)
            for block in blocks:
                if _count_structures(block) > 0 or has_nesting(block):
                    return True
        return False

    def sibling_count(stmts: tuple[Stmt, ...]) -> int:
        direct = sum(1 for s in stmts if isinstance(s, (If, Loop)))
        nested_max = 0
        for s in stmts:
            if isinstance(s, If):
                nested_max = max(nested_max, sibling_count(s.then))
                if s.orelse is not None:
                    nested_max = max(nested_max, sibling_count(s.orelse))
            elif isinstance(s, Loop):
                nested_max = max(nested_max, sibling_count(s.body))
        return max(direct, nested_max)

    nested = has_nesting(body)
    sequential = sibling_count(body) >= 2
    if nested and sequential:
        return ComplexityLevel.HIGH  # mixed formation
    if nested:
        return ComplexityLevel.MID_HIGH
    return ComplexityLevel.LOW_MID


def cyclomatic(p: ProgramSpec) -> int:
    """Decision points (branches and loops) plus one."""
    issues = validate_program(p)
    if issues:
        raise InvalidProgramError("; ".join(issues))
    return _count_structures(p.body) + 1


# --- serialization ----------------------------------------------------------


def expr_to_dict(e: Expr) -> dict:
    match e:
        case Var(name):
            return {"t": "var", "name": name}
        case Lit(value):
            return {"t": "int", "value": value}
        case BinOp(op, left, right):
            return {"t": "bin", "op": op, "l": expr_to_dict(left), "r": expr_to_dict(right)}
    raise TypeError(f"not an expression: {e!r}")


def expr_from_dict(d: dict) -> Expr:
    match d["t"]:
        case "var":
            return Var(d["name"])
        case "int":
            return Lit(d["value"])
        case "bin":
            return BinOp(d["op"], expr_from_dict(d["l"]), expr_from_dict(d["r"]))
    raise ValueError(f"unknown expression tag {d['t']!r}")


def pred_to_dict(p: Predicate) -> dict:
    match p:
        case Comparison(op, left, right):
            return {"t": "cmp", "op": op, "l": expr_to_dict(left), "r": expr_to_dict(right)}
        case BoolVar(name):
            return {"t": "boolvar", "name": name}
        case BoolOp(op, parts):
            return {"t": "boolop", "op": op, "parts": [pred_to_dict(x) for x in parts]}
    raise TypeError(f"not a predicate: {p!r}")


def pred_from_dict(d: dict) -> Predicate:
    match d["t"]:
        case "cmp":
            return Comparison(d["op"], expr_from_dict(d["l"]), expr_from_dict(d["r"]))
        case "boolvar":
            return BoolVar(d["name"])
        case "boolop":
            return BoolOp(d["op"], tuple(pred_from_dict(x) for x in d["parts"]))
    raise ValueError(f"unknown predicate tag {d['t']!r}")


def stmt_to_dict(s: Stmt) -> dict:
    match s:
        case Assign(var, expr):
            return {"t": "assign", "var": var, "e": expr_to_dict(expr)}
        case If(pred, then, orelse):
            out = {"t": "if", "pred": pred_to_dict(pred), "then": [stmt_to_dict(x) for x in then]}
            if orelse is not None:
                out["else"] = [stmt_to_dict(x) for x in orelse]
            return out
        case Loop(bound, body):
            if isinstance(bound, CountedBound):
                b = {"t": "count", "n": bound.count}
            else:
                b = pred_to_dict(bound)
            return {"t": "loop", "bound": b, "body": [stmt_to_dict(x) for x in body]}
        case Return(var):
            return {"t": "return", "var": var}
    raise TypeError(f"not a statement: {s!r}")


def stmt_from_dict(d: dict) -> Stmt:
    match d["t"]:
        case "assign":
            return Assign(d["var"], expr_from_dict(d["e"]))
        case "if":
            orelse = tuple(stmt_from_dict(x) for x in d["else"]) if "else" in d else None
            return If(
                pred_from_dict(d["pred"]),
                tuple(stmt_from_dict(x) for x in d["then"]),
                orelse,
            )
        case "loop":
            b = d["bound"]
            bound = CountedBound(b["n"]) if b["t"] == "count" else pred_from_dict(b)
            return Loop(bound, tuple(stmt_from_dict(x) for x in d["body"]))
        case "return":
            return Return(d["var"])
    raise ValueError(f"unknown statement tag {d['t']!r}")


def program_to_dict(p: ProgramSpec) -> dict:
    return {
        "id": p.id,
        "category": p.category.value,
        "params": list(p.params),
        "body": [stmt_to_dict(s) for s in p.body],
        "binding": [list(pair) for pair in p.binding],
        "complexity": p.complexity.label,
    }


def program_from_dict(d: dict) -> ProgramSpec:
    return ProgramSpec(
        id=d["id"],
        category=StructureCategory(d["category"]),
        params=tuple(d["params"]),
        body=tuple(stmt_from_dict(s) for s in d["body"]),
        binding=tuple((h, e) for h, e in d["binding"]),
        complexity=ComplexityLevel.from_label(d["complexity"]),
    )
