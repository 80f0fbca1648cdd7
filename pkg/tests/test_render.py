"""Dialect rendering, SLOC counting, prompt assembly, round trips."""

from __future__ import annotations

import hashlib

import pytest

from flowbench.errors import PromptError
from flowbench.fragments import parse_predicate
from flowbench.interp import execute
from flowbench.model import StructureCategory
from flowbench.render import (
    DEFAULT_INSTRUCTION,
    PROMPT_MARKER,
    Dialect,
    build_prompt,
    make_bundle,
    render,
    render_predicate,
    render_snippet,
    sloc,
)

from .helpers import parse_program


class TestDialects:
    def test_compound_predicate_surface_forms(self):
        pred = parse_predicate("x > 4 or x < 10")
        assert render_predicate(pred, Dialect.PYTHON) == "x > 4 or x < 10"
        assert render_predicate(pred, Dialect.JAVA) == "x > 4 || x < 10"

    def test_and_maps_to_double_ampersand(self):
        pred = parse_predicate("x > 5 and y > 10")
        assert render_predicate(pred, Dialect.JAVA) == "x > 5 && y > 10"

    def test_reference_program_python_text(self, two_branch_program):
        text = render(two_branch_program, Dialect.PYTHON)
        assert text.startswith("def compute(x, y):")
        assert text.count("if ") == 2
        assert text.rstrip().endswith("return x")

    def test_reference_program_java_text(self, two_branch_program):
        text = render(two_branch_program, Dialect.JAVA)
        assert "public class Compute {" in text
        assert "public static int compute(int x, int y) {" in text
        assert "return x;" in text

    def test_java_snippet_drops_class_wrapper(self, two_branch_program):
        snippet = render_snippet(two_branch_program, Dialect.JAVA)
        assert "class" not in snippet
        assert snippet.startswith("public static int compute")

    def test_counted_loop_surface_forms(self, counted_loop_program):
        assert "for i in range(3):" in render(counted_loop_program, Dialect.PYTHON)
        assert "for (int i = 0; i < 3; i++) {" in render(
            counted_loop_program, Dialect.JAVA
        )

    def test_nested_counted_loops_use_distinct_counters(self, entries):
        from flowbench.generate import instantiate
        from flowbench.templates import template_for

        p = instantiate(
            template_for(StructureCategory.NESTED_LOOP),
            {
                "outer_bound": entries["loop-count-3"],
                "inner_bound": entries["loop-count-3"],
                "body": entries["xcuse-add10"],
            },
        )
        text = render(p, Dialect.PYTHON)
        assert "for i in range(3):" in text
        assert "for j in range(3):" in text

    def test_dynamic_loop_renders_as_while(self, entries):
        from flowbench.generate import instantiate
        from flowbench.templates import template_for

        p = instantiate(
            template_for(StructureCategory.LOOP),
            {"bound": entries["ypuse-10-gt"], "body": entries["ycuse-sub7"]},
        )
        assert "while y > 10:" in render(p, Dialect.PYTHON)
        assert "while (y > 10) {" in render(p, Dialect.JAVA)

    def test_injective_on_default_dataset(self, default_dataset):
        # brute-force pairwise comparison via set cardinality
        texts = [render(p, Dialect.PYTHON) for p in default_dataset.programs]
        assert len(set(texts)) == len(texts)
        java_texts = [render(p, Dialect.JAVA) for p in default_dataset.programs]
        assert len(set(java_texts)) == len(java_texts)

    def test_deterministic(self, default_dataset):
        for p in default_dataset.programs[:10]:
            assert render(p) == render(p)


class TestRoundTrip:
    def test_python_parse_recovers_every_generated_program(self, default_dataset):
        for p in default_dataset.programs:
            params, body = parse_program(render(p, Dialect.PYTHON))
            assert params == p.params, p.id
            assert body == p.body, p.id

    def test_rendered_python_matches_interpreter(self, default_dataset):
        # dialects are render-only; the rendered source must agree with the
        # interpreter on sampled inputs
        for p in default_dataset.programs:
            ns: dict = {}
            exec(compile(render(p, Dialect.PYTHON), p.id, "exec"), ns)
            func = ns["compute"]
            for j in range(100):
                inputs = {
                    v: -100
                    + int.from_bytes(
                        hashlib.sha256(f"{p.id}|diff|{j}|{v}".encode()).digest()[:8],
                        "big",
                    )
                    % 201
                    for v in p.params
                }
                assert func(**inputs) == execute(p, inputs).output, (p.id, inputs)


class TestSloc:
    def test_empty_text(self):
        assert sloc("") == 0

    def test_reference_program_counts_six_lines(self, two_branch_program):
        assert sloc(render(two_branch_program, Dialect.PYTHON)) == 6

    def test_blank_lines_do_not_count(self, two_branch_program):
        text = render(two_branch_program, Dialect.PYTHON)
        padded = text.replace("    if y == 10:", "\n    if y == 10:")
        assert sloc(padded) == 6

    def test_comment_lines_do_not_count(self):
        assert sloc("# setup\nx = 1\n// note\ny = 2\n") == 2


class TestPrompts:
    def test_default_instruction_is_appended(self, two_branch_program):
        source = render_snippet(two_branch_program, Dialect.PYTHON)
        prompt = build_prompt(source)
        assert prompt.endswith(
            "Given the program, please create test cases that can pass "
            "100% statement coverage"
        )
        assert prompt.count(source) == 1

    def test_custom_instruction_is_verbatim(self):
        prompt = build_prompt("def compute(x, y):\n    return x\n", "List 3 test cases.")
        assert prompt.endswith("List 3 test cases.")

    def test_wrapper_without_marker_rejected(self):
        with pytest.raises(PromptError, match="marker"):
            build_prompt("src", DEFAULT_INSTRUCTION, wrapper="{source} and nothing else")

    def test_empty_instruction_rejected(self):
        with pytest.raises(PromptError, match="nonempty"):
            build_prompt("src", "")

    def test_marker_literal(self):
        assert PROMPT_MARKER == "#REPLACE_FOR_PROMPT"

    def test_bundle_embeds_source_once(self, default_dataset):
        for p in default_dataset.programs[:5]:
            bundle = make_bundle(p, Dialect.PYTHON)
            assert bundle.prompt.count(bundle.source) == 1
            assert bundle.instruction == DEFAULT_INSTRUCTION

    def test_java_bundle_presents_method_only(self, two_branch_program):
        bundle = make_bundle(two_branch_program, Dialect.JAVA)
        assert "class" not in bundle.prompt
        assert "public static int compute" in bundle.prompt
