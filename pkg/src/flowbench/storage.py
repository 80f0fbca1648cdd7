"""Line-oriented persistence for every pipeline artifact.

Each artifact is UTF-8 JSON lines with sorted keys and LF endings, so runs
diff cleanly and identical inputs produce identical bytes on any platform.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

from .errors import PipelineError
from .extract import MalformedCase, RawTestCase, TestCase
from .generate import CategoryStats, Dataset, DatasetStats, _stats_for
from .interp import Verdict, VerdictKind
from .llm import CompletionRecord
from .metrics import EvaluationRecord
from .model import (
    ProgramSpec,
    StructureCategory,
    program_from_dict,
    program_to_dict,
)
from .render import Dialect, PromptBundle, render, sloc


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    text = "".join(_dumps(r) + "\n" for r in records)
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    path = Path(path)
    if not path.exists():
        raise PipelineError(f"missing input file: {path}")
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise PipelineError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc


# --- datasets -----------------------------------------------------------------


def dataset_record(p: ProgramSpec) -> dict:
    record = program_to_dict(p)
    record["sloc"] = {
        d.value: sloc(render(p, d)) for d in Dialect
    }
    return record


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    write_jsonl(path, (dataset_record(p) for p in dataset.programs))


def load_dataset(path: str | Path, config_fingerprint: str = "") -> Dataset:
    programs = tuple(program_from_dict(r) for r in read_jsonl(path))
    if not programs:
        raise PipelineError(f"dataset file {path} is empty")
    stats = _stats_for(list(programs), Dialect.PYTHON)
    return Dataset(
        programs=programs, config_fingerprint=config_fingerprint, stats=stats
    )


def stats_record(stats: DatasetStats) -> dict:
    return {
        "dialect": stats.dialect.value,
        "total": stats.total,
        "categories": {
            row.category.value: {
                "count": row.count,
                "coverage": row.coverage,
                "avg_sloc": row.avg_sloc,
            }
            for row in stats.categories
        },
    }


def stats_from_record(record: dict) -> DatasetStats:
    rows = tuple(
        CategoryStats(
            category=StructureCategory(name),
            count=data["count"],
            coverage=data["coverage"],
            avg_sloc=data["avg_sloc"],
        )
        for name, data in sorted(
            record["categories"].items(),
            key=lambda kv: StructureCategory(kv[0]).display_name,
        )
    )
    return DatasetStats(
        dialect=Dialect(record["dialect"]), total=record["total"], categories=rows
    )


# --- prompts ------------------------------------------------------------------


def prompt_record(b: PromptBundle) -> dict:
    return {
        "id": b.program_id,
        "dialect": b.dialect.value,
        "source": b.source,
        "prompt": b.prompt,
        "instruction": b.instruction,
    }


def prompt_from_record(r: dict) -> PromptBundle:
    return PromptBundle(
        program_id=r["id"],
        dialect=Dialect(r["dialect"]),
        source=r["source"],
        prompt=r["prompt"],
        instruction=r["instruction"],
    )


def save_prompts(bundles: Iterable[PromptBundle], path: str | Path) -> None:
    write_jsonl(path, (prompt_record(b) for b in bundles))


def load_prompts(path: str | Path) -> list[PromptBundle]:
    return [prompt_from_record(r) for r in read_jsonl(path)]


# --- completion records ---------------------------------------------------------


def completion_record_dict(r: CompletionRecord) -> dict:
    return {
        "program_id": r.program_id,
        "prompt_sha256": r.prompt_sha256,
        "model": r.model,
        "response": r.response,
        "latency_s": r.latency_s,
        "attempts": r.attempts,
        "timestamp": r.timestamp,
        "truncated": r.truncated,
    }


def completion_from_record(r: dict) -> CompletionRecord:
    return CompletionRecord(
        program_id=r["program_id"],
        prompt_sha256=r["prompt_sha256"],
        model=r["model"],
        response=r["response"],
        latency_s=r["latency_s"],
        attempts=r["attempts"],
        timestamp=r["timestamp"],
        truncated=r.get("truncated", False),
    )


def save_responses(records: Iterable[CompletionRecord], path: str | Path) -> None:
    ordered = sorted(records, key=lambda r: r.program_id)
    write_jsonl(path, (completion_record_dict(r) for r in ordered))


def load_responses(path: str | Path) -> list[CompletionRecord]:
    return [completion_from_record(r) for r in read_jsonl(path)]


# --- extracted test cases --------------------------------------------------------


def case_record(case: TestCase | MalformedCase) -> dict:
    if isinstance(case, MalformedCase):
        return {
            "program_id": case.program_id,
            "index": case.index,
            "malformed": case.reason,
            "complete": case.expected_present,
            "inputs": None,
            "expected": None,
            "raw_inputs": [list(pair) for pair in case.raw.inputs],
            "raw_expected": case.raw.expected,
            "strategy": case.raw.strategy,
            "span": list(case.raw.span),
        }
    raw = case.raw
    return {
        "program_id": case.program_id,
        "index": case.index,
        "malformed": None,
        "complete": case.complete,
        "inputs": case.inputs,
        "expected": case.expected,
        "raw_inputs": [list(pair) for pair in raw.inputs] if raw else None,
        "raw_expected": raw.expected if raw else None,
        "strategy": raw.strategy if raw else "direct",
        "span": list(raw.span) if raw else None,
    }


def case_from_record(r: dict) -> TestCase | MalformedCase:
    raw = None
    if r.get("raw_inputs") is not None:
        raw = RawTestCase(
            inputs=tuple((name, value) for name, value in r["raw_inputs"]),
            expected=r.get("raw_expected"),
            span=tuple(r["span"]) if r.get("span") else (0, 0),
            strategy=r.get("strategy", "direct"),
        )
    if r.get("malformed"):
        assert raw is not None
        return MalformedCase(
            program_id=r["program_id"],
            index=r["index"],
            reason=r["malformed"],
            raw=raw,
            expected_present=r.get("complete", False),
        )
    return TestCase(
        program_id=r["program_id"],
        index=r["index"],
        inputs=dict(r["inputs"]),
        expected=r["expected"],
        complete=r["complete"],
        raw=raw,
    )


def save_cases(cases: Iterable[TestCase | MalformedCase], path: str | Path) -> None:
    ordered = sorted(cases, key=lambda c: (c.program_id, c.index))
    write_jsonl(path, (case_record(c) for c in ordered))


def load_cases(path: str | Path) -> list[TestCase | MalformedCase]:
    return [case_from_record(r) for r in read_jsonl(path)]


# --- evaluation records -----------------------------------------------------------


def result_record(r: EvaluationRecord) -> dict:
    return {
        "program_id": r.program_id,
        "category": r.category.value,
        "n_total": r.n_total,
        "n_complete": r.n_complete,
        "n_correct": r.n_correct,
        "error_rate": r.error_rate,
        "untestable": r.untestable,
        "verdicts": [
            {"kind": v.kind.value, "detail": v.detail} for v in r.verdicts
        ],
    }


def result_from_record(r: dict) -> EvaluationRecord:
    return EvaluationRecord(
        program_id=r["program_id"],
        category=StructureCategory(r["category"]),
        n_total=r["n_total"],
        n_complete=r["n_complete"],
        n_correct=r["n_correct"],
        verdicts=tuple(
            Verdict(VerdictKind(v["kind"]), v.get("detail")) for v in r["verdicts"]
        ),
        error_rate=r["error_rate"],
        untestable=r["untestable"],
    )


def save_results(records: Iterable[EvaluationRecord], path: str | Path) -> None:
    ordered = sorted(records, key=lambda r: r.program_id)
    write_jsonl(path, (result_record(r) for r in ordered))


def load_results(path: str | Path) -> list[EvaluationRecord]:
    return [result_from_record(r) for r in read_jsonl(path)]


# --- csv tables --------------------------------------------------------------------


def write_csv(path: str | Path, rows: list[list[str]]) -> None:
    def esc(cell: str) -> str:
        if any(ch in cell for ch in ",\"\n"):
            return '"' + cell.replace('"', '""') + '"'
        return cell

    text = "".join(",".join(esc(c) for c in row) + "\n" for row in rows)
    Path(path).write_text(text, encoding="utf-8", newline="\n")
