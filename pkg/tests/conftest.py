"""Shared fixtures.

``two_branch_program`` is the reference two-if program used across the
suite; its expected outputs (29, 4, 8, 21) were hand-traced and frozen.
The replay fixture builds a six-program dataset with scripted responses
covering correct, incorrect, incomplete, and unparseable cases.
"""

from __future__ import annotations

import pytest

from flowbench.catalog import default_catalog
from flowbench.generate import GenerationConfig, generate_dataset, instantiate
from flowbench.interp import execute
from flowbench.llm import ReplayStore
from flowbench.model import StructureCategory
from flowbench.render import make_bundle
from flowbench.templates import template_for


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def entries(catalog):
    return {e.id: e for e in catalog.entries}


@pytest.fixture(scope="session")
def two_branch_program(entries):
    """def compute(x, y): if x > 5: x = x + y + 10; if y == 10: x = x + y - 7; return x"""
    t = template_for(StructureCategory.SEQUENTIAL_BRANCH)
    return instantiate(
        t,
        {
            "pred_1": entries["xpuse-05-gt"],
            "then_1": entries["xcuse-xy-add10"],
            "pred_2": entries["ypuse-10-eq"],
            "then_2": entries["xcuse-xy-sub7"],
        },
    )


@pytest.fixture(scope="session")
def counted_loop_program(entries):
    """def compute(x, y): for i in range(3): x = x + 10; return x"""
    t = template_for(StructureCategory.LOOP)
    return instantiate(
        t,
        {"bound": entries["loop-count-3"], "body": entries["xcuse-add10"]},
    )


@pytest.fixture(scope="session")
def default_dataset():
    return generate_dataset(GenerationConfig())


REPLAY_CATEGORIES = (
    StructureCategory.BRANCH,
    StructureCategory.LOOP,
    StructureCategory.NESTED_LOOP,
    StructureCategory.SEQUENCE,
    StructureCategory.SEQUENTIAL_BRANCH,
    StructureCategory.SEQUENTIAL_BRANCH_WITH_ELSE,
)


def replay_fixture_config() -> GenerationConfig:
    return GenerationConfig(categories=REPLAY_CATEGORIES, limit_per_category=1, seed=7)


def _out(p, x, y) -> int:
    return execute(p, {"x": x, "y": y}).output


def scripted_responses(programs) -> dict[str, str]:
    """One response per program: a mix of correct, incorrect, incomplete,
    and unparseable shapes. Expected outputs come from the interpreter, so
    correctness labels hold by construction."""
    by_cat = {p.category: p for p in programs}
    b = by_cat[StructureCategory.BRANCH]
    lp = by_cat[StructureCategory.LOOP]
    nl = by_cat[StructureCategory.NESTED_LOOP]
    sq = by_cat[StructureCategory.SEQUENCE]
    sb = by_cat[StructureCategory.SEQUENTIAL_BRANCH]
    se = by_cat[StructureCategory.SEQUENTIAL_BRANCH_WITH_ELSE]
    return {
        # three asserts: two correct, one off by one
        b.id: (
            "Here are test cases:\n"
            "```python\n"
            f"assert compute(6, 10) == {_out(b, 6, 10)}\n"
            f"assert compute(0, 0) == {_out(b, 0, 0)}\n"
            f"assert compute(2, 3) == {_out(b, 2, 3) + 1}\n"
            "```\n"
        ),
        # labeled pairs: one correct, one wrong
        lp.id: (
            f"Input 1: (x, y) = (0, 20)\nExpected Output: {_out(lp, 0, 20)}\n"
            f"Input 2: (x, y) = (3, 4)\nExpected Output: {_out(lp, 3, 4) - 2}\n"
        ),
        # one correct assert plus one incomplete labeled input
        nl.id: (
            f"assert compute(1, 2) == {_out(nl, 1, 2)}\n"
            "Input 2: (x, y) = (5, 11)\n"
        ),
        # inputs only: every case incomplete, program untestable
        sq.id: (
            "Input 1: (x, y) = (6, 10)\n"
            "Input 2: (x, y) = (7, 10)\n"
            "Input 3: (x, y) = (4, 10)\n"
        ),
        # nothing extractable at all
        sb.id: "These need more context to test; consider adding docstrings.",
        # call-expression prose, correct
        se.id: f"The call compute(1, 12) returns {_out(se, 1, 12)}.",
    }


@pytest.fixture(scope="session")
def replay_setup():
    """(dataset, bundles, store) for the six-program end-to-end fixture."""
    dataset = generate_dataset(replay_fixture_config())
    assert len(dataset.programs) == 6
    bundles = [make_bundle(p) for p in dataset.programs]
    responses = scripted_responses(dataset.programs)
    store = ReplayStore()
    for bundle in bundles:
        store.put(bundle.prompt, responses[bundle.program_id], "replay-model")
    return dataset, bundles, store
