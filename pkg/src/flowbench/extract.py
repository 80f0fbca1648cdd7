"""Parse free-text model responses into test cases.

Responses arrive in wildly different shapes: assertion lines inside code
fences, "Input N: (x, y) = (a, b)" lists with or without expected-output
lines, or prose like "compute(6, 10) returns 29". Three extraction
strategies run in a fixed priority order over the raw text; overlapping
matches keep the higher-priority reading. Nothing is ever fabricated:
every extracted literal sits verbatim inside the span the case claims.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import ProgramSpec

STRATEGY_ASSERT = "assert"
STRATEGY_LABELED = "labeled"
STRATEGY_CALL = "call"


@dataclass(frozen=True)
class RawTestCase:
    """An extracted (inputs, expected) pair before binding to a program.

    ``inputs`` holds (variable name or None, literal text) pairs in the
    order they appeared; ``span`` is the character range of the response
    the case was read from.
    """

    inputs: tuple[tuple[str | None, str], ...]
    expected: str | None
    span: tuple[int, int]
    strategy: str


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # domain object, not a pytest class

    program_id: str
    index: int
    inputs: dict[str, int]
    expected: int | None
    complete: bool
    raw: RawTestCase | None = None


@dataclass(frozen=True)
class MalformedCase:
    """A raw case that could not be bound to the program's signature."""

    program_id: str
    index: int
    reason: str
    raw: RawTestCase
    expected_present: bool


_ASSERT_RE = re.compile(
    r"assert\s+compute\s*\(\s*(?P<args>[^()\n]*?)\s*\)\s*==\s*(?P<val>-?\d+)"
)

_CALL_RE = re.compile(
    r"compute\s*\(\s*(?P<args>[^()\n]*?)\s*\)\s*"
    r"(?:==|(?:should\s+)?returns?|->|→|evaluates\s+to|gives)\s*"
    r"(?P<val>-?\d+)",
    re.IGNORECASE,
)

_INPUT_LABEL_RE = re.compile(
    r"^[^\S\n]*(?:[-*]\s*)?(?:Test\s*Case\s*\d+\s*[:.]?\s*)?"
    r"Inputs?\s*\d*\s*[:=]\s*(?P<rhs>[^\n]+)",
    re.IGNORECASE | re.MULTILINE,
)

_EXPECTED_LABEL_RE = re.compile(
    r"^[^\S\n]*(?:[-*]\s*)?"
    r"(?:Expected(?:\s*(?:Output|Result|Return))?|Output|Result|Returns?)"
    r"\s*\d*\s*[:=]\s*(?P<val>[^\n]+)",
    re.IGNORECASE | re.MULTILINE,
)

_NAMED_PAIR_RE = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(-?[\w.]+)")
_TUPLE_ASSIGN_RE = re.compile(
    r"\(\s*(?P<names>[A-Za-z_][A-Za-z_0-9]*(?:\s*,\s*[A-Za-z_][A-Za-z_0-9]*)*)\s*\)"
    r"\s*=\s*\(\s*(?P<values>[^()]*?)\s*\)"
)
_VALUE_TOKEN_RE = re.compile(r"-?[\w.]+")


def parse_response(text: str, signature: tuple[str, ...]) -> list[RawTestCase]:
    """Extract raw test cases from a model response.

    Strategies, in priority order: assertion statements, labeled
    input/expected pairs, call expressions in prose. An unrecognizable
    response yields an empty list. The result is ordered by span start
    and deterministic for a given text.
    """
    accepted: list[RawTestCase] = []

    def overlaps(span: tuple[int, int]) -> bool:
        return any(span[0] < b and a < span[1] for a, b in (c.span for c in accepted))

    for m in _ASSERT_RE.finditer(text):
        inputs = _positional_inputs(m.group("args"))
        if not inputs:
            continue
        case = RawTestCase(inputs, m.group("val"), m.span(), STRATEGY_ASSERT)
        if not overlaps(case.span):
            accepted.append(case)

    for case in _labeled_cases(text):
        if not overlaps(case.span):
            accepted.append(case)

    for m in _CALL_RE.finditer(text):
        inputs = _positional_inputs(m.group("args"))
        if not inputs:
            continue
        case = RawTestCase(inputs, m.group("val"), m.span(), STRATEGY_CALL)
        if not overlaps(case.span):
            accepted.append(case)

    accepted.sort(key=lambda c: c.span)
    return accepted


def _positional_inputs(args: str) -> tuple[tuple[str | None, str], ...]:
    named = _NAMED_PAIR_RE.findall(args)
    if named and len(named) == len([p for p in args.split(",") if p.strip()]):
        return tuple((name, value) for name, value in named)
    parts = [p.strip() for p in args.split(",") if p.strip()]
    return tuple((None, p) for p in parts)


def _labeled_cases(text: str) -> list[RawTestCase]:
    """Pair each "Input ...:" line with the first expected-output line that
    appears before the next input label."""
    labels = list(_INPUT_LABEL_RE.finditer(text))
    cases: list[RawTestCase] = []
    for i, m in enumerate(labels):
        window_end = labels[i + 1].start() if i + 1 < len(labels) else len(text)
        inputs = _parse_input_rhs(m.group("rhs"))
        if not inputs:
            continue
        expected = None
        span_end = m.end()
        exp_match = _EXPECTED_LABEL_RE.search(text, m.end(), window_end)
        if exp_match:
            token = _VALUE_TOKEN_RE.search(exp_match.group("val"))
            if token:
                expected = token.group()
                span_end = exp_match.end()
        cases.append(
            RawTestCase(inputs, expected, (m.start(), span_end), STRATEGY_LABELED)
        )
    return cases


def _parse_input_rhs(rhs: str) -> tuple[tuple[str | None, str], ...]:
    rhs = rhs.strip()
    tup = _TUPLE_ASSIGN_RE.search(rhs)
    if tup:
        names = [n.strip() for n in tup.group("names").split(",")]
        values = [v.strip() for v in tup.group("values").split(",") if v.strip()]
        if len(names) == len(values):
            return tuple(zip(names, values))
        return tuple((None, v) for v in values)
    named = _NAMED_PAIR_RE.findall(rhs)
    if named:
        return tuple((name, value) for name, value in named)
    stripped = rhs.strip("()")
    values = [v.strip() for v in stripped.split(",") if v.strip()]
    if values and all(_VALUE_TOKEN_RE.fullmatch(v) for v in values):
        return tuple((None, v) for v in values)
    return ()


def bind(raw: RawTestCase, p: ProgramSpec, index: int = 0) -> TestCase | MalformedCase:
    """Bind raw literals to the program's parameters.

    Literals map positionally unless the response named its variables.
    Arity mismatches and non-integer input literals produce a malformed
    marker; a non-integer expected value degrades the case to incomplete
    (it carries no usable expected output).
    """
    expected = _parse_int(raw.expected) if raw.expected is not None else None
    expected_present = expected is not None

    names = [name for name, _ in raw.inputs]
    if any(n is not None for n in names):
        given = {name: value for name, value in raw.inputs if name is not None}
        if set(given) != set(p.params):
            return MalformedCase(
                p.id, index,
                f"named inputs {sorted(given)} do not match parameters {list(p.params)}",
                raw, expected_present,
            )
        ordered = [(v, given[v]) for v in p.params]
    else:
        if len(raw.inputs) != len(p.params):
            return MalformedCase(
                p.id, index,
                f"arity mismatch: {len(raw.inputs)} inputs for {len(p.params)} parameters",
                raw, expected_present,
            )
        ordered = [(v, value) for v, (_, value) in zip(p.params, raw.inputs)]

    inputs: dict[str, int] = {}
    for var, literal in ordered:
        value = _parse_int(literal)
        if value is None:
            return MalformedCase(
                p.id, index, f"non-integer input {literal!r} for {var}", raw,
                expected_present,
            )
        inputs[var] = value

    return TestCase(
        program_id=p.id,
        index=index,
        inputs=inputs,
        expected=expected,
        complete=expected_present,
        raw=raw,
    )


def _parse_int(text: str | None) -> int | None:
    if text is None:
        return None
    try:
        return int(text.strip())
    except ValueError:
        return None


def extract_cases(
    response: str, p: ProgramSpec
) -> list[TestCase | MalformedCase]:
    """Parse a response and bind every raw case to the program."""
    raws = parse_response(response, p.params)
    return [bind(raw, p, index=i) for i, raw in enumerate(raws)]
