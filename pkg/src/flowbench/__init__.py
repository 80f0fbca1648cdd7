"""flowbench: control-flow benchmark generation and LLM test-case scoring.

The pipeline has three phases: generate small imperative programs from
control-flow templates and a statement catalog, prompt a language model
for unit test cases for each program, then judge the parsed cases against
the built-in reference interpreter and aggregate category-level metrics.
"""

__version__ = "0.1.0"

from .catalog import (
    Catalog,
    CatalogEntry,
    candidates_for,
    default_catalog,
    load_catalog,
    save_catalog,
)
from .extract import MalformedCase, RawTestCase, TestCase, bind, extract_cases, parse_response
from .generate import (
    Dataset,
    DatasetStats,
    GenerationConfig,
    dataset_stats,
    enumerate_bindings,
    generate_dataset,
    instantiate,
)
from .interp import (
    BoundaryReport,
    ExecutionResult,
    TerminationReport,
    Verdict,
    VerdictKind,
    boundary_report,
    check_termination,
    execute,
    judge,
    statement_coverage,
)
from .llm import (
    CompletionRecord,
    LiveProvider,
    ModelConfig,
    ReplayProvider,
    ReplayStore,
    complete,
    complete_many,
    record_session,
)
from .metrics import (
    CategoryReport,
    EvalMode,
    EvaluationRecord,
    ModelReport,
    avg_error_rate,
    avg_testcases,
    error_rate,
    evaluate_run,
    incomplete_rate,
    render_report,
    untestable_rate,
)
from .model import (
    ComplexityLevel,
    PlaceholderKind,
    ProgramSpec,
    StructureCategory,
    classify_complexity,
    cyclomatic,
    validate_program,
)
from .render import (
    DEFAULT_INSTRUCTION,
    Dialect,
    PromptBundle,
    build_prompt,
    make_bundle,
    render,
    sloc,
)
from .templates import Template, builtin_templates, template_for

__all__ = [
    "__version__",
    "Catalog",
    "CatalogEntry",
    "candidates_for",
    "default_catalog",
    "load_catalog",
    "save_catalog",
    "MalformedCase",
    "RawTestCase",
    "TestCase",
    "bind",
    "extract_cases",
    "parse_response",
    "Dataset",
    "DatasetStats",
    "GenerationConfig",
    "dataset_stats",
    "enumerate_bindings",
    "generate_dataset",
    "instantiate",
    "BoundaryReport",
    "ExecutionResult",
    "TerminationReport",
    "Verdict",
    "VerdictKind",
    "boundary_report",
    "check_termination",
    "execute",
    "judge",
    "statement_coverage",
    "CompletionRecord",
    "LiveProvider",
    "ModelConfig",
    "ReplayProvider",
    "ReplayStore",
    "complete",
    "complete_many",
    "record_session",
    "CategoryReport",
    "EvalMode",
    "EvaluationRecord",
    "ModelReport",
    "avg_error_rate",
    "avg_testcases",
    "error_rate",
    "evaluate_run",
    "incomplete_rate",
    "render_report",
    "untestable_rate",
    "ComplexityLevel",
    "PlaceholderKind",
    "ProgramSpec",
    "StructureCategory",
    "classify_complexity",
    "cyclomatic",
    "validate_program",
    "DEFAULT_INSTRUCTION",
    "Dialect",
    "PromptBundle",
    "build_prompt",
    "make_bundle",
    "render",
    "sloc",
    "Template",
    "builtin_templates",
    "template_for",
]
