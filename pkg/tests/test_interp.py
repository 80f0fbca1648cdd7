"""Interpreter: execution, judging, coverage, boundaries, termination."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowbench.errors import FuelExhaustedError, InputBindingError
from flowbench.extract import MalformedCase, RawTestCase, TestCase
from flowbench.fragments import parse_assign, parse_predicate
from flowbench.interp import (
    DEFAULT_FUEL,
    VerdictKind,
    boundary_report,
    check_termination,
    execute,
    executable_node_count,
    judge,
    statement_coverage,
)
from flowbench.model import (
    If,
    Loop,
    ProgramSpec,
    Return,
    StructureCategory,
    classify_complexity,
)

from .strategies import loop_free_programs


def handmade(body, params=("x", "y")):
    from dataclasses import replace

    spec = ProgramSpec(
        id="handmade",
        category=StructureCategory.SEQUENCE,
        params=params,
        body=tuple(body),
    )
    return replace(spec, complexity=classify_complexity(spec))


def tc(program_id, inputs, expected=None):
    return TestCase(
        program_id=program_id,
        index=0,
        inputs=inputs,
        expected=expected,
        complete=expected is not None,
    )


class TestExecute:
    # hand-traced: 6>5 so x=6+10+10=26, then y==10 so x=26+10-7=29
    @pytest.mark.parametrize(
        "x,y,expected",
        [(6, 10, 29), (4, 5, 4), (5, 10, 8), (6, 5, 21)],
    )
    def test_two_branch_reference_outputs(self, two_branch_program, x, y, expected):
        assert execute(two_branch_program, {"x": x, "y": y}).output == expected

    def test_three_iterations_add_thirty(self, counted_loop_program):
        assert execute(counted_loop_program, {"x": 0, "y": 0}).output == 30

    def test_trace_is_nonempty_and_within_fuel(self, two_branch_program):
        result = execute(two_branch_program, {"x": 6, "y": 10})
        assert result.trace
        assert result.steps == len(result.trace) <= DEFAULT_FUEL

    def test_missing_parameter_rejected(self, two_branch_program):
        with pytest.raises(InputBindingError, match="y"):
            execute(two_branch_program, {"x": 6})

    def test_non_integer_input_rejected(self, two_branch_program):
        with pytest.raises(InputBindingError):
            execute(two_branch_program, {"x": 6, "y": "ten"})

    def test_fuel_exhaustion_on_divergent_program(self):
        diverging = handmade(
            [
                Loop(parse_predicate("x < y"), (parse_assign("y = y + 7"),)),
                Return("x"),
            ]
        )
        with pytest.raises(FuelExhaustedError):
            execute(diverging, {"x": 0, "y": 5}, fuel=1000)

    def test_fuel_prefix_property(self, default_dataset):
        # a run that completed at some fuel gives the same result at any higher fuel
        for p in default_dataset.programs[:20]:
            inputs = {v: 13 for v in p.params}
            small = execute(p, inputs, fuel=DEFAULT_FUEL)
            big = execute(p, inputs, fuel=DEFAULT_FUEL * 10)
            assert small == big

    def test_arbitrary_precision(self):
        p = handmade(
            [
                parse_assign("x = x * 7"),
                parse_assign("x = x * 7"),
                parse_assign("x = x * 7"),
                Return("x"),
            ]
        )
        assert execute(p, {"x": 10**20, "y": 0}).output == 343 * 10**20

    @given(loop_free_programs(), st.integers(-50, 50), st.integers(-50, 50))
    @settings(max_examples=50, deadline=None)
    def test_deterministic(self, p, x, y):
        a = execute(p, {"x": x, "y": y})
        b = execute(p, {"x": x, "y": y})
        assert a == b


class TestJudge:
    def test_correct(self, two_branch_program):
        v = judge(two_branch_program, tc(two_branch_program.id, {"x": 6, "y": 10}, 29))
        assert v.kind is VerdictKind.CORRECT

    def test_incomplete(self, two_branch_program):
        v = judge(two_branch_program, tc(two_branch_program.id, {"x": 6, "y": 10}))
        assert v.kind is VerdictKind.INCOMPLETE

    def test_incorrect(self, two_branch_program):
        v = judge(two_branch_program, tc(two_branch_program.id, {"x": 6, "y": 10}, 26))
        assert v.kind is VerdictKind.INCORRECT
        assert "29" in v.detail

    def test_malformed_marker_passes_through(self, two_branch_program):
        raw = RawTestCase(((None, "a"),), "1", (0, 5), "assert")
        case = MalformedCase(two_branch_program.id, 0, "non-integer input", raw, True)
        assert judge(two_branch_program, case).kind is VerdictKind.MALFORMED

    def test_missing_input_is_malformed(self, two_branch_program):
        v = judge(two_branch_program, tc(two_branch_program.id, {"x": 6}, 29))
        assert v.kind is VerdictKind.MALFORMED

    def test_fuel_exhaustion_is_incorrect(self):
        diverging = handmade(
            [
                Loop(parse_predicate("x < y"), (parse_assign("y = y + 7"),)),
                Return("x"),
            ]
        )
        v = judge(diverging, tc("handmade", {"x": 0, "y": 5}, 0), fuel=500)
        assert v.kind is VerdictKind.INCORRECT
        assert "fuel" in v.detail

    def test_correct_trace_is_subset_of_full_coverage_union(self, two_branch_program):
        full = set()
        for inputs in ({"x": 6, "y": 10}, {"x": 4, "y": 5}):
            full.update(execute(two_branch_program, inputs).trace)
        run = execute(two_branch_program, {"x": 6, "y": 10})
        assert set(run.trace) <= full


class TestCoverage:
    def test_full_coverage_single_input(self, two_branch_program):
        assert statement_coverage(two_branch_program, [{"x": 6, "y": 10}]) == 1.0

    def test_partial_coverage(self, two_branch_program):
        # both predicates and the return execute; both then-arms are skipped
        assert statement_coverage(two_branch_program, [{"x": 4, "y": 5}]) == 0.6

    def test_union_restores_full_coverage(self, two_branch_program):
        inputs = [{"x": 6, "y": 10}, {"x": 4, "y": 5}]
        assert statement_coverage(two_branch_program, inputs) == 1.0

    def test_empty_input_list(self, two_branch_program):
        assert statement_coverage(two_branch_program, []) == 0.0

    def test_node_count_of_reference_program(self, two_branch_program):
        assert executable_node_count(two_branch_program) == 5

    def test_monotone_in_input_sets(self, default_dataset):
        probes = [{"x": a, "y": b} for a, b in ((0, 0), (6, 10), (16, 11), (-3, 9))]
        for p in default_dataset.programs[:25]:
            previous = 0.0
            for k in range(len(probes) + 1):
                cov = statement_coverage(p, probes[:k])
                assert cov >= previous
                previous = cov


class TestBoundary:
    def test_hit_and_both_outcomes(self, entries):
        from flowbench.generate import instantiate
        from flowbench.templates import template_for

        p = instantiate(
            template_for(StructureCategory.BRANCH),
            {"pred": entries["xpuse-05-gt"], "then_body": entries["xcuse-add10"]},
        )
        report = boundary_report(
            p, [tc(p.id, {"x": 5, "y": 0}), tc(p.id, {"x": 6, "y": 0})]
        )
        entry = report.entry("x > 5")
        assert entry.boundary == 5
        assert entry.boundary_hit
        assert entry.both_outcomes

    def test_off_boundary_inputs_set_nothing(self, entries):
        from flowbench.generate import instantiate
        from flowbench.templates import template_for

        p = instantiate(
            template_for(StructureCategory.BRANCH),
            {"pred": entries["xpuse-05-gt"], "then_body": entries["xcuse-add10"]},
        )
        report = boundary_report(
            p, [tc(p.id, {"x": 7, "y": 0}), tc(p.id, {"x": 8, "y": 0})]
        )
        entry = report.entry("x > 5")
        assert not entry.boundary_hit
        assert not entry.both_outcomes  # every evaluation was true

    def test_reference_program_with_four_probing_inputs(self, two_branch_program):
        # (6,10), (5,10), (6,5), (5,5): checked by hand against the traces
        cases = [
            tc(two_branch_program.id, {"x": x, "y": y})
            for x, y in ((6, 10), (5, 10), (6, 5), (5, 5))
        ]
        report = boundary_report(two_branch_program, cases)
        first = report.entry("x > 5")
        second = report.entry("y == 10")
        assert first.both_outcomes and second.both_outcomes
        assert first.boundary_hit  # x = 5 lands exactly on the boundary
        assert second.boundary_hit  # y = 10 equals the tested constant

    def test_flags_monotone_in_cases(self, two_branch_program):
        cases = [
            tc(two_branch_program.id, {"x": x, "y": y})
            for x, y in ((7, 0), (5, 10), (2, 10))
        ]
        seen: dict[tuple, tuple] = {}
        for k in range(len(cases) + 1):
            report = boundary_report(two_branch_program, cases[:k])
            for e in report.entries:
                key = (e.node_id, e.member)
                old = seen.get(key, (False, False, False))
                new = (e.boundary_hit, e.saw_true, e.saw_false)
                assert all(o <= n for o, n in zip(old, new))
                seen[key] = new

    def test_compound_members_tracked_separately(self, entries):
        from flowbench.generate import instantiate
        from flowbench.templates import template_for

        p = instantiate(
            template_for(StructureCategory.SEQUENTIAL_BRANCH),
            {
                "pred_1": entries["xpuse-05-gt"],
                "then_1": entries["xcuse-add10"],
                "pred_2": entries["comp-and-gt"],
                "then_2": entries["xcuse-sub7"],
            },
        )
        report = boundary_report(p, [tc(p.id, {"x": 5, "y": 10}, None)])
        # short-circuit: x > 5 is false (x=5), so y > 10 was never evaluated
        x_member = report.entry("x > 5")
        texts = [e.text for e in report.entries]
        assert texts.count("x > 5") == 2  # branch predicate and compound member
        y_member = report.entry("y > 10")
        assert x_member.boundary_hit
        assert not y_member.saw_true and not y_member.saw_false

    def test_no_constant_comparisons_yields_empty_report(self):
        p = handmade(
            [If(parse_predicate("x > y"), (parse_assign("x = x + 10"),)), Return("x")]
        )
        assert boundary_report(p, []).entries == ()


class TestTermination:
    def test_counted_loop_always_passes(self, counted_loop_program):
        report = check_termination(counted_loop_program, (-100, 100), samples=50)
        assert report.passed

    def test_progressing_while_loop_passes(self):
        # max iterations from the domain is about 200/7, far below the fuel cap
        p = handmade(
            [
                Loop(parse_predicate("x < y"), (parse_assign("x = x + 7"),)),
                Return("x"),
            ]
        )
        report = check_termination(p, (-100, 100), samples=200, fuel=10_000)
        assert report.passed
        assert report.samples_run == 200

    def test_divergent_program_fails_with_counterexample(self):
        p = handmade(
            [
                Loop(parse_predicate("x < y"), (parse_assign("y = y + 1"),)),
                Return("x"),
            ]
        )
        report = check_termination(p, (-100, 100), samples=500, fuel=2000)
        assert not report.passed
        assert report.counterexample is not None
        assert report.counterexample["x"] < report.counterexample["y"]

    def test_deterministic_probing(self, counted_loop_program):
        a = check_termination(counted_loop_program, (-5, 5), samples=20)
        b = check_termination(counted_loop_program, (-5, 5), samples=20)
        assert a == b
