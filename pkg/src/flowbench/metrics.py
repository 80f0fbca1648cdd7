"""Per-program error rates, category aggregation, and report rendering.

A program's error rate is (total - correct) / total over its judged test
cases. Two denominator conventions exist and both are exposed:

* complete-only (default): only cases carrying an expected output count,
  mirroring an evaluation that skips incomplete cases entirely;
* all-cases: every extracted case counts and incomplete ones are scored
  as incorrect.

A program whose response produced no complete case at all is untestable.
Untestable programs feed the untestable rate of their category and are
excluded from average error rates in both modes (they have no judgeable
case to average over).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import MetricsError
from .extract import MalformedCase, TestCase
from .generate import Dataset, DatasetStats
from .interp import DEFAULT_FUEL, Verdict, VerdictKind, judge
from .model import ProgramSpec, StructureCategory


class EvalMode(enum.Enum):
    COMPLETE_ONLY = "complete-only"
    ALL_CASES = "all-cases"


@dataclass(frozen=True)
class EvaluationRecord:
    program_id: str
    category: StructureCategory
    n_total: int
    n_complete: int
    n_correct: int
    verdicts: tuple[Verdict, ...]
    error_rate: float | None
    untestable: bool


@dataclass(frozen=True)
class CategoryReport:
    category: StructureCategory
    programs: int
    untestable_count: int
    untestable_rate: float
    avg_error_rate: float | None
    total_cases: int
    avg_cases: float


@dataclass(frozen=True)
class ModelReport:
    model: str
    mode: EvalMode
    records: tuple[EvaluationRecord, ...]
    categories: tuple[CategoryReport, ...]
    total_cases: int
    complete_cases: int

    @property
    def incomplete_cases(self) -> int:
        return self.total_cases - self.complete_cases

    @property
    def incomplete_rate(self) -> float:
        return incomplete_rate(self.total_cases, self.complete_cases)


# --- the five rate computations -----------------------------------------------


def error_rate(n_total: int, n_correct: int) -> float | None:
    """(total - correct) / total; None when there is nothing to judge."""
    if n_total < 0 or n_correct < 0 or n_correct > n_total:
        raise MetricsError(f"bad counts: total={n_total}, correct={n_correct}")
    if n_total == 0:
        return None
    return (n_total - n_correct) / n_total


def avg_error_rate(records: Iterable[EvaluationRecord]) -> float | None:
    """Mean error rate over programs that have one."""
    defined = [r.error_rate for r in records if r.error_rate is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def untestable_rate(records: Sequence[EvaluationRecord]) -> float:
    """Fraction of programs whose response carried no complete test case."""
    if not records:
        raise MetricsError("untestable rate over an empty category")
    return sum(1 for r in records if r.untestable) / len(records)


def incomplete_rate(total_cases: int, complete_cases: int) -> float:
    """(total - complete) / total over every case a model generated."""
    if total_cases <= 0:
        raise MetricsError("incomplete rate needs at least one test case")
    if complete_cases < 0 or complete_cases > total_cases:
        raise MetricsError(
            f"bad counts: total={total_cases}, complete={complete_cases}"
        )
    return (total_cases - complete_cases) / total_cases


def avg_testcases(total_cases: int, programs: int) -> float:
    """Average number of generated cases per program in a category."""
    if programs <= 0:
        raise MetricsError("average test cases needs at least one program")
    return total_cases / programs


# --- judging and aggregation ----------------------------------------------------


def _is_complete(case: TestCase | MalformedCase) -> bool:
    if isinstance(case, MalformedCase):
        return case.expected_present
    return case.complete


def evaluate_program(
    p: ProgramSpec,
    cases: Sequence[TestCase | MalformedCase],
    mode: EvalMode,
    fuel: int = DEFAULT_FUEL,
) -> EvaluationRecord:
    verdicts = tuple(judge(p, case, fuel) for case in cases)
    n_total = len(cases)
    n_complete = sum(1 for case in cases if _is_complete(case))
    n_correct = sum(1 for v in verdicts if v.kind is VerdictKind.CORRECT)
    denominator = n_complete if mode is EvalMode.COMPLETE_ONLY else n_total
    rate = error_rate(denominator, n_correct) if denominator > 0 else None
    untestable = n_complete == 0
    if untestable:
        rate = None
    return EvaluationRecord(
        program_id=p.id,
        category=p.category,
        n_total=n_total,
        n_complete=n_complete,
        n_correct=n_correct,
        verdicts=verdicts,
        error_rate=rate,
        untestable=untestable,
    )


def aggregate_records(
    records: Sequence[EvaluationRecord],
    model: str,
    mode: EvalMode,
) -> ModelReport:
    """Fold per-program records into category and model aggregates."""
    ordered = sorted(records, key=lambda r: (r.category.value, r.program_id))
    by_cat: dict[StructureCategory, list[EvaluationRecord]] = {}
    for r in ordered:
        by_cat.setdefault(r.category, []).append(r)

    category_reports = []
    for category in sorted(by_cat, key=lambda c: c.display_name):
        group = by_cat[category]
        total_cases = sum(r.n_total for r in group)
        category_reports.append(
            CategoryReport(
                category=category,
                programs=len(group),
                untestable_count=sum(1 for r in group if r.untestable),
                untestable_rate=untestable_rate(group),
                avg_error_rate=avg_error_rate(group),
                total_cases=total_cases,
                avg_cases=avg_testcases(total_cases, len(group)),
            )
        )

    return ModelReport(
        model=model,
        mode=mode,
        records=tuple(ordered),
        categories=tuple(category_reports),
        total_cases=sum(r.n_total for r in ordered),
        complete_cases=sum(r.n_complete for r in ordered),
    )


def evaluate_run(
    dataset: Dataset | Sequence[ProgramSpec],
    cases_by_program: Mapping[str, Sequence[TestCase | MalformedCase]],
    mode: EvalMode = EvalMode.COMPLETE_ONLY,
    model: str = "model",
    fuel: int = DEFAULT_FUEL,
) -> ModelReport:
    """Judge every program's cases and aggregate the full report."""
    programs = list(dataset.programs if isinstance(dataset, Dataset) else dataset)
    known = {p.id for p in programs}
    orphans = sorted(set(cases_by_program) - known)
    if orphans:
        raise MetricsError(f"test cases reference unknown program {orphans[0]!r}")

    records = [
        evaluate_program(p, cases_by_program.get(p.id, ()), mode, fuel)
        for p in programs
    ]
    return aggregate_records(records, model, mode)


# --- report rendering -------------------------------------------------------------


@dataclass(frozen=True)
class ReportDocument:
    text: str
    tables: dict[str, list[list[str]]]


def _pct(value: float) -> str:
    return f"{value * 100:.2f}%"


def _rate(value: float | None) -> str:
    return "-" if value is None else f"{value:.3f}"


def _text_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells: list[str]) -> str:
        return "  ".join(cell.ljust(w) for cell, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def render_report(
    reports: Sequence[ModelReport],
    stats: DatasetStats | None = None,
) -> ReportDocument:
    """Render the category metrics, untestable rates, incomplete rates, and
    dataset statistics as one plain-text document plus machine tables.

    The machine-readable metrics table is long-form: one row per
    (category, model, metric) with metrics avg_cases, avg_error_rate and
    untestable_rate. Categories order alphabetically; models keep the
    order they were passed in.
    """
    if not reports:
        raise MetricsError("no model reports to render")
    for report in reports:
        if not report.categories:
            raise MetricsError(f"model {report.model!r} has no categories")

    sections: list[str] = []
    tables: dict[str, list[list[str]]] = {}

    # (a) category x model metrics
    rows_a: list[list[str]] = []
    tidy: list[list[str]] = [["category", "model", "metric", "value"]]
    for report in reports:
        for cat in report.categories:
            rows_a.append(
                [
                    cat.category.display_name,
                    report.model,
                    f"{cat.avg_cases:.2f}",
                    _rate(cat.avg_error_rate),
                ]
            )
            tidy.append(
                [cat.category.display_name, report.model, "avg_cases", repr(cat.avg_cases)]
            )
            tidy.append(
                [
                    cat.category.display_name,
                    report.model,
                    "avg_error_rate",
                    "" if cat.avg_error_rate is None else repr(cat.avg_error_rate),
                ]
            )
            tidy.append(
                [
                    cat.category.display_name,
                    report.model,
                    "untestable_rate",
                    repr(cat.untestable_rate),
                ]
            )
    rows_a.sort(key=lambda r: (r[0], [m.model for m in reports].index(r[1])))
    sections.append(
        "Average test cases and error rate per category\n"
        + _text_table(["Category", "Model", "Avg Test Cases", "Avg Error Rate"], rows_a)
    )
    tidy[1:] = sorted(tidy[1:], key=lambda r: (r[0], [m.model for m in reports].index(r[1]), r[2]))
    tables["metrics"] = tidy

    # (b) untestable rates
    rows_b = []
    for report in reports:
        for cat in report.categories:
            rows_b.append(
                [cat.category.display_name, report.model, _pct(cat.untestable_rate)]
            )
    rows_b.sort(key=lambda r: (r[0], [m.model for m in reports].index(r[1])))
    sections.append(
        "Untestable programs per category\n"
        + _text_table(["Category", "Model", "Untestable"], rows_b)
    )

    # (c) incomplete-case rates per model
    rows_c = [
        [
            report.model,
            str(report.total_cases),
            str(report.complete_cases),
            _pct(report.incomplete_rate),
        ]
        for report in reports
    ]
    sections.append(
        "Incomplete test case rates\n"
        + _text_table(
            ["Model", "Total Test Cases", "Complete Test Cases", "Incomplete Rate"],
            rows_c,
        )
    )
    tables["incomplete"] = [
        ["model", "total_cases", "complete_cases", "incomplete_rate"]
    ] + [
        [r.model, str(r.total_cases), str(r.complete_cases), repr(r.incomplete_rate)]
        for r in reports
    ]

    # (d) dataset statistics
    if stats is not None:
        rows_d = [
            [
                row.category.display_name,
                f"{row.avg_sloc:.1f}",
                _pct(row.coverage),
            ]
            for row in stats.categories
        ]
        sections.append(
            f"Dataset composition ({stats.total} programs, {stats.dialect.value} SLOC)\n"
            + _text_table(["Category", "Avg SLOC", "Coverage"], rows_d)
        )
        tables["dataset_stats"] = [["category", "count", "coverage", "avg_sloc"]] + [
            [row.category.display_name, str(row.count), repr(row.coverage), repr(row.avg_sloc)]
            for row in stats.categories
        ]

    return ReportDocument(text="\n\n".join(sections) + "\n", tables=tables)
