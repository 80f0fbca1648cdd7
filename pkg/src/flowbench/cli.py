"""Pipeline orchestration.

Stages run as subcommands over a shared output directory, each reading the
previous stage's file and writing its own:

    generate -> render -> run -> evaluate -> report

Every artifact is line-oriented text; deleting a downstream file and
rerunning its stage reproduces it exactly from the upstream files. A run
manifest records which files each completed stage produced.

Exit codes: 0 success, 1 usage error, 2 pipeline error, 3 provider error.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .catalog import load_catalog
from .errors import FlowbenchError, PipelineError, ProviderError
from .extract import extract_cases
from .generate import (
    ALL_CATEGORIES,
    GenerationConfig,
    dataset_stats,
    generate_dataset,
)
from .llm import (
    CompletionRecord,
    LiveProvider,
    ModelConfig,
    ReplayProvider,
    ReplayStore,
    complete_many,
)
from .metrics import EvalMode, ReportDocument, aggregate_records, evaluate_run, render_report
from .model import ComplexityLevel, StructureCategory
from .render import DEFAULT_INSTRUCTION, Dialect, make_bundle
from .storage import (
    load_dataset,
    load_prompts,
    load_responses,
    load_results,
    save_cases,
    save_dataset,
    save_prompts,
    save_responses,
    save_results,
    stats_record,
    write_csv,
)

DATASET_FILE = "dataset.jsonl"
STATS_FILE = "stats.json"
PROMPTS_FILE = "prompts.jsonl"
RESPONSES_FILE = "responses.jsonl"
CASES_FILE = "testcases.jsonl"
RESULTS_FILE = "results.jsonl"
EVALUATION_FILE = "evaluation.json"
REPORT_FILE = "report.md"
MANIFEST_FILE = "manifest.json"

STAGES = ("generate", "prompt", "complete", "extract", "evaluate", "report")


# --- configuration ------------------------------------------------------------


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise PipelineError(f"config file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PipelineError(f"config file {p}: invalid JSON ({exc.msg})") from exc


def _cfg(config: dict, section: str, key: str, flag, default):
    """Flag beats config beats default."""
    if flag is not None:
        return flag
    return config.get(section, {}).get(key, default)


def _parse_categories(value) -> tuple[StructureCategory, ...]:
    if isinstance(value, str):
        names = [v.strip() for v in value.split(",") if v.strip()]
    else:
        names = list(value)
    out = []
    for name in names:
        try:
            out.append(StructureCategory(name))
        except ValueError:
            known = ", ".join(c.value for c in StructureCategory)
            raise click.UsageError(f"unknown category {name!r}; known: {known}")
    return tuple(out)


def _file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Manifest:
    def __init__(self, out_dir: Path):
        self.path = out_dir / MANIFEST_FILE
        if self.path.exists():
            self.data = json.loads(self.path.read_text(encoding="utf-8"))
        else:
            self.data = {"tool_version": __version__, "stages": {}}

    def mark(self, stage: str, file: Path, **extra) -> None:
        if stage not in STAGES:
            raise PipelineError(f"unknown stage {stage}")
        self.data["tool_version"] = __version__
        self.data["stages"][stage] = {
            "file": file.name,
            "sha256": _file_sha256(file),
            "completed_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            **extra,
        }
        self.path.write_text(
            json.dumps(self.data, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def recorded_sha(self, stage: str) -> str | None:
        return self.data["stages"].get(stage, {}).get("sha256")


# --- commands -------------------------------------------------------------------


@click.group()
@click.version_option(__version__)
def cli():
    """Generate benchmark programs, collect model test cases, score them."""


@cli.command("generate")
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--categories", default=None, help="Comma-separated category names.")
@click.option("--limit-per-category", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--catalog", "catalog_path", default=None, help="Catalog file to use.")
@click.option("--max-complexity", default=None, help="Low/LowMid/Mid/MidHigh/High.")
def cmd_generate(config_path, out_dir, categories, limit_per_category, seed,
                 catalog_path, max_complexity):
    """Generate the program dataset and its statistics."""
    config = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    cats = _cfg(config, "generation", "categories", categories, None)
    resolved_catalog = None
    catalog_file = _cfg(config, "generation", "catalog", catalog_path, None)
    if catalog_file:
        resolved_catalog = load_catalog(catalog_file)
    gen_cfg = GenerationConfig(
        catalog=resolved_catalog,
        categories=_parse_categories(cats) if cats else ALL_CATEGORIES,
        max_complexity=ComplexityLevel.from_label(
            _cfg(config, "generation", "max_complexity", max_complexity, "Mid")
        ),
        limit_per_category=int(
            _cfg(config, "generation", "limit_per_category", limit_per_category, 20)
        ),
        seed=int(_cfg(config, "generation", "seed", seed, 0)),
    )
    dataset = generate_dataset(gen_cfg)

    dataset_path = out / DATASET_FILE
    save_dataset(dataset, dataset_path)
    stats_by_dialect = {
        d.value: stats_record(dataset_stats(dataset, d)) for d in Dialect
    }
    (out / STATS_FILE).write_text(
        json.dumps(
            {"config_fingerprint": dataset.config_fingerprint, **stats_by_dialect},
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    Manifest(out).mark("generate", dataset_path,
                       config_fingerprint=dataset.config_fingerprint)

    click.echo(f"generated {len(dataset.programs)} programs into {dataset_path}")
    for row in dataset.stats.categories:
        click.echo(
            f"  {row.category.display_name}: {row.count} programs "
            f"({row.coverage * 100:.2f}%), avg SLOC {row.avg_sloc:.1f}"
        )


@cli.command("render")
@click.option("--config", "config_path", default=None)
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--dialect", default=None, type=click.Choice([d.value for d in Dialect]))
@click.option("--instruction", default=None)
def cmd_render(config_path, dataset_path, out_dir, dialect, instruction):
    """Render each program and assemble its prompt."""
    config = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataset = load_dataset(dataset_path)
    chosen = Dialect(_cfg(config, "render", "dialect", dialect, Dialect.PYTHON.value))
    text = _cfg(config, "render", "instruction", instruction, None) or DEFAULT_INSTRUCTION
    bundles = [make_bundle(p, chosen, text) for p in dataset.programs]
    prompts_path = out / PROMPTS_FILE
    save_prompts(bundles, prompts_path)
    Manifest(out).mark("prompt", prompts_path,
                       dataset_sha256=_file_sha256(Path(dataset_path)))
    click.echo(f"wrote {len(bundles)} prompts to {prompts_path}")


@cli.command("run")
@click.option("--config", "config_path", default=None)
@click.option("--prompts", "prompts_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--provider", type=click.Choice(["live", "replay"]), default="live")
@click.option("--store", "store_path", default=None,
              help="Replay store (required for --provider replay).")
@click.option("--record", "record_path", default=None,
              help="Record live completions into this store.")
@click.option("--model", default=None)
@click.option("--endpoint", default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--max-output-tokens", type=int, default=None)
@click.option("--timeout", "timeout_s", type=float, default=None)
@click.option("--retries", type=int, default=None)
@click.option("--concurrency", type=int, default=None)
def cmd_run(config_path, prompts_path, out_dir, provider, store_path, record_path,
            model, endpoint, temperature, max_output_tokens, timeout_s, retries,
            concurrency):
    """Request one completion per program; resumable."""
    config = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundles = load_prompts(prompts_path)

    model_cfg = ModelConfig(
        model=_cfg(config, "model", "name", model, "gpt-4o-mini"),
        endpoint=_cfg(config, "model", "endpoint", endpoint,
                      "https://api.openai.com/v1"),
        temperature=float(_cfg(config, "model", "temperature", temperature, 0.0)),
        max_output_tokens=_cfg(config, "model", "max_output_tokens",
                               max_output_tokens, None),
        timeout_s=float(_cfg(config, "model", "timeout_s", timeout_s, 60.0)),
        max_retries=int(_cfg(config, "model", "max_retries", retries, 3)),
    )
    workers = int(_cfg(config, "model", "concurrency", concurrency, 4))

    responses_path = out / RESPONSES_FILE
    existing: dict[str, CompletionRecord] = {}
    if responses_path.exists():
        existing = {r.program_id: r for r in load_responses(responses_path)}

    pending = [(b.program_id, b.prompt) for b in bundles if b.program_id not in existing]
    click.echo(
        f"{len(bundles)} prompts, {len(existing)} already answered, "
        f"{len(pending)} to complete"
    )

    if provider == "replay":
        if not store_path:
            raise click.UsageError("--provider replay requires --store")
        chosen = ReplayProvider(ReplayStore.load(store_path))
        deterministic = True
    else:
        chosen = LiveProvider()  # credential check happens before any request
        deterministic = False

    records, failures = complete_many(
        pending, model_cfg, chosen, concurrency=workers,
        deterministic_clock=deterministic,
    )

    if provider == "live" and record_path:
        store = ReplayStore.load(record_path)
        by_id = {b.program_id: b.prompt for b in bundles}
        for r in records:
            h = store.put(by_id[r.program_id], r.response, r.model)
            store.append(record_path, h)

    merged = list(existing.values()) + records
    save_responses(merged, responses_path)
    Manifest(out).mark("complete", responses_path,
                       prompts_sha256=_file_sha256(Path(prompts_path)))
    click.echo(f"wrote {len(merged)} responses to {responses_path}")

    if failures:
        click.echo(f"{len(failures)} request(s) failed:", err=True)
        for program_id, exc in failures:
            click.echo(f"  {program_id}: {exc}", err=True)
        raise ProviderError(f"{len(failures)} of {len(pending)} requests failed")


@cli.command("evaluate")
@click.option("--config", "config_path", default=None)
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--responses", "responses_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--mode", default=None,
              type=click.Choice([m.value for m in EvalMode]))
@click.option("--fuel", type=int, default=None)
@click.option("--model-name", default=None, help="Label for the report.")
def cmd_evaluate(config_path, dataset_path, responses_path, out_dir, mode, fuel,
                 model_name):
    """Extract test cases from responses, judge them, compute all metrics."""
    config = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    dataset = load_dataset(dataset_path)
    responses = load_responses(responses_path)

    by_id = dataset.by_id()
    orphan = [r.program_id for r in responses if r.program_id not in by_id]
    if orphan:
        raise PipelineError(
            f"responses reference {len(orphan)} unknown program(s), "
            f"first: {orphan[0]}"
        )
    answered = {r.program_id for r in responses}
    missing = sorted(set(by_id) - answered)
    if missing:
        raise PipelineError(
            f"{len(missing)} dataset program(s) have no response, "
            f"first: {missing[0]}; rerun the run stage"
        )
    manifest = Manifest(out)
    recorded = manifest.recorded_sha("generate")
    if recorded and recorded != _file_sha256(Path(dataset_path)):
        raise PipelineError(
            "manifest mismatch: dataset file differs from the one this run "
            "generated; regenerate or point --dataset at the right file"
        )

    eval_mode = EvalMode(_cfg(config, "evaluation", "mode", mode, "complete-only"))
    eval_fuel = int(_cfg(config, "evaluation", "fuel", fuel, 10_000))
    label = model_name or (responses[0].model if responses else "model")

    cases_by_program = {}
    all_cases = []
    for r in sorted(responses, key=lambda r: r.program_id):
        cases = extract_cases(r.response, by_id[r.program_id])
        cases_by_program[r.program_id] = cases
        all_cases.extend(cases)

    cases_path = out / CASES_FILE
    save_cases(all_cases, cases_path)
    manifest.mark("extract", cases_path)

    report = evaluate_run(dataset, cases_by_program, eval_mode, label, eval_fuel)

    results_path = out / RESULTS_FILE
    save_results(report.records, results_path)
    (out / EVALUATION_FILE).write_text(
        json.dumps(
            {
                "model": report.model,
                "mode": report.mode.value,
                "total_cases": report.total_cases,
                "complete_cases": report.complete_cases,
                "incomplete_rate": report.incomplete_rate,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    manifest.mark("evaluate", results_path)

    document = render_report([report], dataset.stats)
    _write_report(out, document)
    manifest.mark("report", out / REPORT_FILE)

    untestable = sum(1 for r in report.records if r.untestable)
    click.echo(
        f"evaluated {len(report.records)} programs, {report.total_cases} cases "
        f"({report.complete_cases} complete), {untestable} untestable"
    )
    click.echo(f"report written to {out / REPORT_FILE}")


def _write_report(out: Path, document: ReportDocument) -> None:
    (out / REPORT_FILE).write_text(document.text, encoding="utf-8", newline="\n")
    for name, rows in document.tables.items():
        write_csv(out / f"{name}.csv", rows)


@cli.command("report")
@click.option("--results", "results_path", required=True, type=click.Path(exists=True))
@click.option("--evaluation", "evaluation_path", default=None,
              help="evaluation.json written by the evaluate stage.")
@click.option("--dataset", "dataset_path", default=None, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def cmd_report(results_path, evaluation_path, dataset_path, out_dir):
    """Re-render the report document from persisted results."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = load_results(results_path)
    eval_meta = {"model": "model", "mode": "complete-only"}
    meta_path = Path(evaluation_path) if evaluation_path else (
        Path(results_path).parent / EVALUATION_FILE
    )
    if meta_path.exists():
        eval_meta.update(json.loads(meta_path.read_text(encoding="utf-8")))
    report = aggregate_records(
        records, eval_meta["model"], EvalMode(eval_meta["mode"])
    )
    stats = None
    if dataset_path:
        stats = load_dataset(dataset_path).stats
    document = render_report([report], stats)
    _write_report(out, document)
    Manifest(out).mark("report", out / REPORT_FILE)
    click.echo(f"report written to {out / REPORT_FILE}")


@cli.command("stats")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--dialect", default=Dialect.PYTHON.value,
              type=click.Choice([d.value for d in Dialect]))
def cmd_stats(dataset_path, dialect):
    """Print dataset composition (counts, coverage, average SLOC)."""
    dataset = load_dataset(dataset_path)
    stats = dataset_stats(dataset, Dialect(dialect))
    click.echo(f"{stats.total} programs ({stats.dialect.value} SLOC)")
    for row in stats.categories:
        click.echo(
            f"  {row.category.display_name}: {row.count} "
            f"({row.coverage * 100:.2f}%), avg SLOC {row.avg_sloc:.1f}"
        )


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except ProviderError as exc:
        click.echo(f"provider error: {exc}", err=True)
        return 3
    except FlowbenchError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
