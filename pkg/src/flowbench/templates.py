"""Control-flow templates with named holes.

A template is a statement skeleton whose holes are filled from the catalog.
Holes carry a name (unique within the template), the placeholder kinds
whose entries may fill them, and the payload class the position accepts,
so a counted loop bound can never land inside an ``if``.

Every built-in template takes both parameters (x, y) and ends with a single
return. The returned variable is x whenever the assembled body assigns x,
otherwise y; this keeps loop programs that only advance y from collapsing
into the identity function on x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import InstantiationError
from .model import (
    Assign,
    CountedBound,
    If,
    Loop,
    PlaceholderKind,
    Predicate,
    Return,
    Stmt,
    StructureCategory,
    assigned_vars,
)
from .render import DEFAULT_PROMPT_WRAPPER

ACCEPT_ASSIGN = "assign"
ACCEPT_PREDICATE = "predicate"
ACCEPT_LOOP_BOUND = "loop-bound"

_C_USE_KINDS = (PlaceholderKind.X_C_USE, PlaceholderKind.Y_C_USE)
_SECOND_PRED_KINDS = (PlaceholderKind.Y_P_USE, PlaceholderKind.COMPOUND_PREDICATE)


@dataclass(frozen=True)
class Hole:
    name: str
    kinds: tuple[PlaceholderKind, ...]
    accepts: str


@dataclass(frozen=True)
class LoopGroup:
    """Which holes make up one loop, for the termination progress rule."""

    bound: str
    body: tuple[str, ...]
    inner: "LoopGroup | None" = None


@dataclass(frozen=True)
class Template:
    category: StructureCategory
    params: tuple[str, ...]
    holes: tuple[Hole, ...]
    loop_groups: tuple[LoopGroup, ...] = ()
    prompt_wrapper: str = field(default=DEFAULT_PROMPT_WRAPPER)

    def hole(self, name: str) -> Hole:
        for h in self.holes:
            if h.name == name:
                return h
        raise KeyError(name)


Payload = Assign | Predicate | CountedBound


def _assign_hole(name: str, *kinds: PlaceholderKind) -> Hole:
    return Hole(name, kinds, ACCEPT_ASSIGN)


def _pred_hole(name: str, *kinds: PlaceholderKind) -> Hole:
    return Hole(name, kinds, ACCEPT_PREDICATE)


def _bound_hole(name: str) -> Hole:
    return Hole(name, (PlaceholderKind.Y_P_USE,), ACCEPT_LOOP_BOUND)


def builtin_templates() -> list[Template]:
    """The seven built-in templates, one per structure category."""
    xy = ("x", "y")
    return [
        Template(
            StructureCategory.SEQUENCE,
            xy,
            holes=(
                _assign_hole("x_def", PlaceholderKind.X_DEF),
                _assign_hole("x_use", PlaceholderKind.X_C_USE),
                _assign_hole("y_def", PlaceholderKind.Y_DEF),
                _assign_hole("y_use", PlaceholderKind.Y_C_USE),
            ),
        ),
        Template(
            StructureCategory.BRANCH,
            xy,
            holes=(
                _pred_hole("pred", PlaceholderKind.X_P_USE),
                _assign_hole("then_body", PlaceholderKind.X_C_USE),
            ),
        ),
        Template(
            StructureCategory.LOOP,
            xy,
            holes=(
                _bound_hole("bound"),
                _assign_hole("body", *_C_USE_KINDS),
            ),
            loop_groups=(LoopGroup("bound", ("body",)),),
        ),
        Template(
            StructureCategory.NESTED_LOOP,
            xy,
            holes=(
                _bound_hole("outer_bound"),
                _bound_hole("inner_bound"),
                _assign_hole("body", *_C_USE_KINDS),
            ),
            loop_groups=(
                LoopGroup("outer_bound", (), inner=LoopGroup("inner_bound", ("body",))),
            ),
        ),
        Template(
            StructureCategory.SEQUENTIAL_BRANCH,
            xy,
            holes=(
                _pred_hole("pred_1", PlaceholderKind.X_P_USE),
                _assign_hole("then_1", PlaceholderKind.X_C_USE),
                _pred_hole("pred_2", *_SECOND_PRED_KINDS),
                _assign_hole("then_2", PlaceholderKind.X_C_USE),
            ),
        ),
        Template(
            StructureCategory.SEQUENTIAL_BRANCH_WITH_ELSE,
            xy,
            holes=(
                _pred_hole("pred_1", PlaceholderKind.X_P_USE),
                _assign_hole("then_1", PlaceholderKind.X_C_USE),
                _assign_hole("else_1", PlaceholderKind.Y_C_USE),
                _pred_hole("pred_2", *_SECOND_PRED_KINDS),
                _assign_hole("then_2", PlaceholderKind.X_C_USE),
                _assign_hole("else_2", PlaceholderKind.Y_C_USE),
            ),
        ),
        Template(
            StructureCategory.SEQUENTIAL_LOOP,
            xy,
            holes=(
                _bound_hole("bound_1"),
                _assign_hole("body_1", *_C_USE_KINDS),
                _bound_hole("bound_2"),
                _assign_hole("body_2", *_C_USE_KINDS),
            ),
            loop_groups=(
                LoopGroup("bound_1", ("body_1",)),
                LoopGroup("bound_2", ("body_2",)),
            ),
        ),
    ]


def template_for(category: StructureCategory) -> Template:
    for t in builtin_templates():
        if t.category is category:
            return t
    raise KeyError(category)


def assemble(template: Template, payloads: Mapping[str, Payload]) -> tuple[Stmt, ...]:
    """Substitute payloads into the template skeleton and append the return."""
    missing = [h.name for h in template.holes if h.name not in payloads]
    if missing:
        h = template.hole(missing[0])
        kinds = "/".join(k.value for k in h.kinds)
        raise InstantiationError(f"unbound placeholder {kinds} (hole {h.name!r})")

    def pl(name: str) -> Payload:
        return payloads[name]

    cat = template.category
    stmts: list[Stmt]
    if cat is StructureCategory.SEQUENCE:
        stmts = [pl("x_def"), pl("x_use"), pl("y_def"), pl("y_use")]
    elif cat is StructureCategory.BRANCH:
        stmts = [If(pl("pred"), (pl("then_body"),))]
    elif cat is StructureCategory.LOOP:
        stmts = [Loop(pl("bound"), (pl("body"),))]
    elif cat is StructureCategory.NESTED_LOOP:
        inner = Loop(pl("inner_bound"), (pl("body"),))
        stmts = [Loop(pl("outer_bound"), (inner,))]
    elif cat is StructureCategory.SEQUENTIAL_BRANCH:
        stmts = [
            If(pl("pred_1"), (pl("then_1"),)),
            If(pl("pred_2"), (pl("then_2"),)),
        ]
    elif cat is StructureCategory.SEQUENTIAL_BRANCH_WITH_ELSE:
        stmts = [
            If(pl("pred_1"), (pl("then_1"),), (pl("else_1"),)),
            If(pl("pred_2"), (pl("then_2"),), (pl("else_2"),)),
        ]
    elif cat is StructureCategory.SEQUENTIAL_LOOP:
        stmts = [
            Loop(pl("bound_1"), (pl("body_1"),)),
            Loop(pl("bound_2"), (pl("body_2"),)),
        ]
    else:
        raise InstantiationError(f"no builder for category {cat.value}")

    assigned = assigned_vars(tuple(stmts))
    ret = "x" if "x" in assigned or "y" not in assigned else "y"
    stmts.append(Return(ret))
    return tuple(stmts)
