"""Reference interpreter: ground-truth outputs, traces, coverage, boundaries.

Execution is a big-step walk over the statement tree with Python integer
semantics (arbitrary precision, no overflow). Every executable node
(assignment, return, branch or loop header) gets a stable id from a
pre-order walk; a run's trace is the sequence of node ids it executed.
Fuel caps the number of node executions so no oracle run can hang.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

from .errors import FuelExhaustedError, InputBindingError, InvalidProgramError
from .extract import MalformedCase, TestCase
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
    Predicate,
    ProgramSpec,
    Return,
    Stmt,
    Var,
)
from .render import render_predicate

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class ExecutionResult:
    output: int
    trace: tuple[int, ...]
    steps: int


class VerdictKind(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    INCOMPLETE = "incomplete"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    detail: str | None = None


@dataclass(frozen=True)
class BoundaryEntry:
    """Observations for one comparison against a constant."""

    node_id: int
    member: int
    text: str
    boundary: int
    boundary_hit: bool
    saw_true: bool
    saw_false: bool

    @property
    def both_outcomes(self) -> bool:
        return self.saw_true and self.saw_false


@dataclass(frozen=True)
class BoundaryReport:
    entries: tuple[BoundaryEntry, ...]

    def entry(self, text: str) -> BoundaryEntry:
        for e in self.entries:
            if e.text == text:
                return e
        raise KeyError(text)


@dataclass(frozen=True)
class TerminationReport:
    passed: bool
    counterexample: dict[str, int] | None
    samples_run: int


class _ReturnValue(Exception):
    def __init__(self, value: int):
        self.value = value


@dataclass(frozen=True)
class _CmpInfo:
    member: int
    const: int
    const_on_left: bool
    text: str


class _Prepared:
    """Per-program tables shared across runs: node ids and comparison info."""

    def __init__(self, program: ProgramSpec):
        self.program = program
        self.node_ids: dict[tuple, int] = {}
        self.node_kinds: list[str] = []
        self.comparisons: dict[tuple[int, tuple], _CmpInfo] = {}
        self._index_block(program.body, ())

    def _index_block(self, stmts: tuple[Stmt, ...], path: tuple) -> None:
        for i, s in enumerate(stmts):
            p = path + (i,)
            match s:
                case Assign():
                    self._add_node(p, "assign")
                case Return():
                    self._add_node(p, "return")
                case If(pred, then, orelse):
                    nid = self._add_node(p + ("p",), "predicate")
                    self._index_pred(pred, nid, ())
                    self._index_block(then, p + ("t",))
                    if orelse is not None:
                        self._index_block(orelse, p + ("e",))
                case Loop(bound, body):
                    if isinstance(bound, CountedBound):
                        self._add_node(p + ("b",), "loop-header")
                    else:
                        nid = self._add_node(p + ("b",), "predicate")
                        self._index_pred(bound, nid, ())
                    self._index_block(body, p + ("l",))

    def _add_node(self, path: tuple, kind: str) -> int:
        nid = len(self.node_kinds)
        self.node_ids[path] = nid
        self.node_kinds.append(kind)
        return nid

    def _index_pred(self, pred: Predicate, node_id: int, member_path: tuple) -> None:
        match pred:
            case Comparison(_, left, right):
                const_on_left = isinstance(left, Lit)
                const_on_right = isinstance(right, Lit)
                if const_on_left == const_on_right:
                    return  # no single constant side to report a boundary for
                const = left.value if const_on_left else right.value
                member = sum(
                    1 for key in self.comparisons if key[0] == node_id
                )
                self.comparisons[(node_id, member_path)] = _CmpInfo(
                    member=member,
                    const=const,
                    const_on_left=const_on_left,
                    text=render_predicate(pred),
                )
            case BoolOp(_, parts):
                for i, part in enumerate(parts):
                    self._index_pred(part, node_id, member_path + (i,))
            case BoolVar(_):
                pass

    @property
    def node_count(self) -> int:
        return len(self.node_kinds)

    # --- execution ---------------------------------------------------------

    def execute(self, inputs: dict[str, int], fuel: int, observer=None) -> ExecutionResult:
        if fuel <= 0:
            raise ValueError("fuel must be positive")
        missing = [v for v in self.program.params if v not in inputs]
        if missing:
            raise InputBindingError(f"missing input for parameter {missing[0]!r}")
        for v in self.program.params:
            if not isinstance(inputs[v], int) or isinstance(inputs[v], bool):
                raise InputBindingError(f"input {v}={inputs[v]!r} is not an integer")

        env = {v: inputs[v] for v in self.program.params}
        trace: list[int] = []

        def hit(path: tuple) -> int:
            nid = self.node_ids[path]
            trace.append(nid)
            if len(trace) > fuel:
                raise FuelExhaustedError(
                    f"program {self.program.id} exhausted fuel {fuel}"
                )
            return nid

        try:
            self._exec_block(self.program.body, (), env, hit, observer)
        except _ReturnValue as ret:
            return ExecutionResult(output=ret.value, trace=tuple(trace), steps=len(trace))
        raise InvalidProgramError(f"program {self.program.id} finished without returning")

    def _exec_block(self, stmts, path, env, hit, observer) -> None:
        for i, s in enumerate(stmts):
            p = path + (i,)
            match s:
                case Assign(var, expr):
                    hit(p)
                    env[var] = _eval_expr(expr, env)
                case Return(var):
                    hit(p)
                    if var not in env:
                        raise InvalidProgramError(f"unbound variable {var}")
                    raise _ReturnValue(env[var])
                case If(pred, then, orelse):
                    nid = hit(p + ("p",))
                    if self._eval_pred(pred, nid, (), env, observer):
                        self._exec_block(then, p + ("t",), env, hit, observer)
                    elif orelse is not None:
                        self._exec_block(orelse, p + ("e",), env, hit, observer)
                case Loop(bound, body):
                    if isinstance(bound, CountedBound):
                        hit(p + ("b",))
                        for _ in range(bound.count):
                            self._exec_block(body, p + ("l",), env, hit, observer)
                    else:
                        while True:
                            nid = hit(p + ("b",))
                            if not self._eval_pred(bound, nid, (), env, observer):
                                break
                            self._exec_block(body, p + ("l",), env, hit, observer)

    def _eval_pred(self, pred, node_id, member_path, env, observer) -> bool:
        match pred:
            case Comparison(op, left, right):
                lv = _eval_expr(left, env)
                rv = _eval_expr(right, env)
                outcome = _COMPARE[op](lv, rv)
                if observer is not None:
                    info = self.comparisons.get((node_id, member_path))
                    if info is not None:
                        value = rv if info.const_on_left else lv
                        observer((node_id, member_path), value == info.const, outcome)
                return outcome
            case BoolVar(name):
                if name not in env:
                    raise InvalidProgramError(f"unbound variable {name}")
                return bool(env[name])
            case BoolOp(op, parts):
                # Short-circuit exactly like the rendered source would.
                if op == "and":
                    for i, part in enumerate(parts):
                        if not self._eval_pred(part, node_id, member_path + (i,), env, observer):
                            return False
                    return True
                for i, part in enumerate(parts):
                    if self._eval_pred(part, node_id, member_path + (i,), env, observer):
                        return True
                return False
        raise TypeError(f"not a predicate: {pred!r}")


_COMPARE = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
}


def _eval_expr(e: Expr, env: dict[str, int]) -> int:
    match e:
        case Lit(value):
            return value
        case Var(name):
            if name not in env:
                raise InvalidProgramError(f"unbound variable {name}")
            return env[name]
        case BinOp(op, left, right):
            lv = _eval_expr(left, env)
            rv = _eval_expr(right, env)
            if op == "+":
                return lv + rv
            if op == "-":
                return lv - rv
            if op == "*":
                return lv * rv
            if op == "%":
                return lv % rv
            raise InvalidProgramError(f"unknown arithmetic operator {op!r}")
    raise TypeError(f"not an expression: {e!r}")


# --- public operations --------------------------------------------------------


def executable_node_count(p: ProgramSpec) -> int:
    return _Prepared(p).node_count


def execute(p: ProgramSpec, inputs: dict[str, int], fuel: int = DEFAULT_FUEL) -> ExecutionResult:
    """Run a program on concrete inputs; deterministic in (p, inputs, fuel)."""
    return _Prepared(p).execute(inputs, fuel)


def judge(p: ProgramSpec, tc: TestCase | MalformedCase, fuel: int = DEFAULT_FUEL) -> Verdict:
    """Judge one test case against the program's actual behavior.

    A case without an expected output is incomplete; a case whose inputs
    cannot drive the program is malformed; otherwise it is correct exactly
    when the actual output equals the expected one.
    """
    if isinstance(tc, MalformedCase):
        return Verdict(VerdictKind.MALFORMED, tc.reason)
    if tc.expected is None:
        return Verdict(VerdictKind.INCOMPLETE, "no expected output")
    try:
        result = execute(p, tc.inputs, fuel)
    except InputBindingError as exc:
        return Verdict(VerdictKind.MALFORMED, str(exc))
    except FuelExhaustedError:
        return Verdict(VerdictKind.INCORRECT, "fuel exhausted")
    if result.output == tc.expected:
        return Verdict(VerdictKind.CORRECT)
    return Verdict(
        VerdictKind.INCORRECT, f"expected {tc.expected}, got {result.output}"
    )


def statement_coverage(
    p: ProgramSpec,
    input_sets: list[dict[str, int]],
    fuel: int = DEFAULT_FUEL,
) -> float:
    """Fraction of executable nodes reached by at least one of the runs."""
    prepared = _Prepared(p)
    executed: set[int] = set()
    for inputs in input_sets:
        executed.update(prepared.execute(inputs, fuel).trace)
    if not input_sets:
        return 0.0
    return len(executed) / prepared.node_count


def boundary_report(
    p: ProgramSpec,
    tcs: list[TestCase],
    fuel: int = DEFAULT_FUEL,
) -> BoundaryReport:
    """Fold boundary observations for every comparison against a constant.

    A comparison's boundary is hit when some run makes its variable side
    equal the constant at the moment of evaluation; adding test cases can
    set flags but never clear them.
    """
    prepared = _Prepared(p)
    hits: dict[tuple, bool] = {k: False for k in prepared.comparisons}
    trues: dict[tuple, bool] = {k: False for k in prepared.comparisons}
    falses: dict[tuple, bool] = {k: False for k in prepared.comparisons}

    def observer(key, at_boundary: bool, outcome: bool) -> None:
        if at_boundary:
            hits[key] = True
        if outcome:
            trues[key] = True
        else:
            falses[key] = True

    for tc in tcs:
        prepared.execute(tc.inputs, fuel, observer)

    entries = []
    for key, info in sorted(prepared.comparisons.items(), key=lambda kv: (kv[0][0], kv[1].member)):
        node_id, _ = key
        entries.append(
            BoundaryEntry(
                node_id=node_id,
                member=info.member,
                text=info.text,
                boundary=info.const,
                boundary_hit=hits[key],
                saw_true=trues[key],
                saw_false=falses[key],
            )
        )
    return BoundaryReport(entries=tuple(entries))


def check_termination(
    p: ProgramSpec,
    domain: tuple[int, int] = (-100, 100),
    samples: int = 1000,
    fuel: int = DEFAULT_FUEL,
) -> TerminationReport:
    """Probe a program with deterministic quasi-random inputs from a range.

    Fails with the first input vector that exhausts fuel. The input stream
    is a pure function of (program id, sample index), so reruns probe the
    same vectors.
    """
    low, high = domain
    if high < low:
        raise ValueError("empty input domain")
    span = high - low + 1
    prepared = _Prepared(p)
    for j in range(samples):
        inputs = {
            v: low + _sample_value(p.id, j, v) % span for v in p.params
        }
        try:
            prepared.execute(inputs, fuel)
        except FuelExhaustedError:
            return TerminationReport(passed=False, counterexample=inputs, samples_run=j + 1)
    return TerminationReport(passed=True, counterexample=None, samples_run=samples)


def _sample_value(program_id: str, index: int, var: str) -> int:
    digest = hashlib.sha256(f"{program_id}|{index}|{var}".encode()).digest()
    return int.from_bytes(digest[:8], "big")
