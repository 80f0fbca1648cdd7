"""Render programs to concrete source text and assemble prompts.

Two dialects are supported. They differ only in surface syntax (keywords,
block delimiters, logical operators); the interpreter never looks at the
rendered text, so dialect choice cannot change a program's meaning.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import PromptError
from .model import (
    Assign,
    BinOp,
    BoolOp,
    BoolVar,
    Comparison,
    CountedBound,
    Expr,
    If,
    Lit,
    Loop,
    LoopBound,
    Predicate,
    ProgramSpec,
    Return,
    Stmt,
    Var,
)


class Dialect(enum.Enum):
    PYTHON = "python"
    JAVA = "java"


FUNCTION_NAME = "compute"
INDENT = "    "

PROMPT_MARKER = "#REPLACE_FOR_PROMPT"
SOURCE_SLOT = "{source}"
DEFAULT_PROMPT_WRAPPER = SOURCE_SLOT + "\n\n" + PROMPT_MARKER
DEFAULT_INSTRUCTION = (
    "Given the program, please create test cases that can pass 100% statement coverage"
)

_LOOP_COUNTERS = "ijklmn"

_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "%": 2}
_BOOL_PREC = {"or": 1, "and": 2}


# --- expression and predicate fragments --------------------------------------


def render_expr(e: Expr) -> str:
    return _expr(e, 0, False)


def _expr(e: Expr, parent_prec: int, right_side: bool) -> str:
    match e:
        case Var(name):
            return name
        case Lit(value):
            return str(value)
        case BinOp(op, left, right):
            prec = _EXPR_PREC[op]
            text = f"{_expr(left, prec, False)} {op} {_expr(right, prec, True)}"
            if prec < parent_prec or (prec == parent_prec and right_side):
                return f"({text})"
            return text
    raise TypeError(f"not an expression: {e!r}")


def render_predicate(p: Predicate, dialect: Dialect = Dialect.PYTHON) -> str:
    return _pred(p, 0, dialect)


def _pred(p: Predicate, parent_prec: int, dialect: Dialect) -> str:
    match p:
        case Comparison(op, left, right):
            return f"{render_expr(left)} {op} {render_expr(right)}"
        case BoolVar(name):
            return name
        case BoolOp(op, parts):
            prec = _BOOL_PREC[op]
            joiner = op if dialect is Dialect.PYTHON else {"and": "&&", "or": "||"}[op]
            text = f" {joiner} ".join(_pred(part, prec, dialect) for part in parts)
            if prec < parent_prec:
                return f"({text})"
            return text
    raise TypeError(f"not a predicate: {p!r}")


def render_assign(s: Assign) -> str:
    return f"{s.var} = {render_expr(s.expr)}"


def render_loop_bound(b: LoopBound) -> str:
    """Canonical (Python-style) fragment form, as stored in catalog files."""
    if isinstance(b, CountedBound):
        return str(b.count)
    return render_predicate(b, Dialect.PYTHON)


def render_fragment(payload: Assign | Predicate | CountedBound) -> str:
    if isinstance(payload, Assign):
        return render_assign(payload)
    if isinstance(payload, CountedBound):
        return str(payload.count)
    return render_predicate(payload, Dialect.PYTHON)


# --- whole programs ----------------------------------------------------------


def render(p: ProgramSpec, dialect: Dialect = Dialect.PYTHON) -> str:
    """Render a program as source text.

    Python style produces a bare ``def``; Java style wraps the method in a
    minimal class so the text stands alone as a compilation unit.
    """
    if dialect is Dialect.PYTHON:
        return _render_python(p)
    method = _render_java_method(p, depth=1)
    return "public class Compute {\n" + method + "}\n"


def render_snippet(p: ProgramSpec, dialect: Dialect = Dialect.PYTHON) -> str:
    """The source form embedded in prompts: Java drops the class wrapper."""
    if dialect is Dialect.PYTHON:
        return _render_python(p)
    return _render_java_method(p, depth=0)


def _render_python(p: ProgramSpec) -> str:
    lines = [f"def {FUNCTION_NAME}({', '.join(p.params)}):"]
    _py_block(p.body, 1, lines, loop_depth=0)
    return "\n".join(lines) + "\n"


def _py_block(stmts: tuple[Stmt, ...], depth: int, lines: list[str], loop_depth: int) -> None:
    pad = INDENT * depth
    for s in stmts:
        match s:
            case Assign():
                lines.append(pad + render_assign(s))
            case Return(var):
                lines.append(pad + f"return {var}")
            case If(pred, then, orelse):
                lines.append(pad + f"if {render_predicate(pred, Dialect.PYTHON)}:")
                _py_block(then, depth + 1, lines, loop_depth)
                if orelse is not None:
                    lines.append(pad + "else:")
                    _py_block(orelse, depth + 1, lines, loop_depth)
            case Loop(bound, body):
                if isinstance(bound, CountedBound):
                    counter = _LOOP_COUNTERS[loop_depth]
                    lines.append(pad + f"for {counter} in range({bound.count}):")
                else:
                    lines.append(pad + f"while {render_predicate(bound, Dialect.PYTHON)}:")
                _py_block(body, depth + 1, lines, loop_depth + 1)


def _render_java_method(p: ProgramSpec, depth: int) -> str:
    pad = INDENT * depth
    params = ", ".join(f"int {v}" for v in p.params)
    lines = [pad + f"public static int {FUNCTION_NAME}({params}) {{"]
    _java_block(p.body, depth + 1, lines, loop_depth=0)
    lines.append(pad + "}")
    return "\n".join(lines) + "\n"


def _java_block(stmts: tuple[Stmt, ...], depth: int, lines: list[str], loop_depth: int) -> None:
    pad = INDENT * depth
    for s in stmts:
        match s:
            case Assign():
                lines.append(pad + render_assign(s) + ";")
            case Return(var):
                lines.append(pad + f"return {var};")
            case If(pred, then, orelse):
                lines.append(pad + f"if ({render_predicate(pred, Dialect.JAVA)}) {{")
                _java_block(then, depth + 1, lines, loop_depth)
                if orelse is not None:
                    lines.append(pad + "} else {")
                    _java_block(orelse, depth + 1, lines, loop_depth)
                lines.append(pad + "}")
            case Loop(bound, body):
                if isinstance(bound, CountedBound):
                    c = _LOOP_COUNTERS[loop_depth]
                    lines.append(pad + f"for (int {c} = 0; {c} < {bound.count}; {c}++) {{")
                else:
                    lines.append(pad + f"while ({render_predicate(bound, Dialect.JAVA)}) {{")
                _java_block(body, depth + 1, lines, loop_depth + 1)
                lines.append(pad + "}")


# --- source metrics ----------------------------------------------------------

_COMMENT_PREFIXES = ("#", "//")


def sloc(source: str) -> int:
    """Count non-blank, non-comment source lines."""
    count = 0
    for line in source.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith(_COMMENT_PREFIXES):
            continue
        count += 1
    return count


# --- prompts -----------------------------------------------------------------


def build_prompt(
    source: str,
    instruction: str = DEFAULT_INSTRUCTION,
    wrapper: str = DEFAULT_PROMPT_WRAPPER,
) -> str:
    """Assemble the single-shot prompt: source text plus one instruction.

    The wrapper must contain the literal prompt marker exactly once; the
    instruction replaces it. The final prompt must embed the source text
    exactly once.
    """
    if not instruction:
        raise PromptError("instruction must be nonempty")
    if wrapper.count(PROMPT_MARKER) != 1:
        raise PromptError(
            f"prompt wrapper must contain the marker {PROMPT_MARKER!r} exactly once"
        )
    text = wrapper.replace(SOURCE_SLOT, source)
    if text.count(source) != 1:
        raise PromptError("prompt must contain the source text exactly once")
    return text.replace(PROMPT_MARKER, instruction)


@dataclass(frozen=True)
class PromptBundle:
    program_id: str
    dialect: Dialect
    source: str
    prompt: str
    instruction: str


def make_bundle(
    p: ProgramSpec,
    dialect: Dialect = Dialect.PYTHON,
    instruction: str = DEFAULT_INSTRUCTION,
    wrapper: str = DEFAULT_PROMPT_WRAPPER,
) -> PromptBundle:
    source = render_snippet(p, dialect)
    prompt = build_prompt(source, instruction, wrapper)
    return PromptBundle(
        program_id=p.id,
        dialect=dialect,
        source=source,
        prompt=prompt,
        instruction=instruction,
    )
