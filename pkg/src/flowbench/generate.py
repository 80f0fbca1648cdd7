"""Instantiate templates with catalog bindings into a benchmark dataset.

Enumeration walks the cross product of each hole's candidates in template
order (candidates sorted by entry id), so the binding stream is
lexicographic and reproducible. When a category's space exceeds its limit,
a hash-based sampler picks a deterministic subset; no global RNG state is
involved, so equal configs give byte-identical datasets on any platform.

Loop templates additionally pass each binding through a progress rule: a
dynamic bound may only pair with bodies that strictly move the tested
variable toward the loop exit, and a dynamic loop nested inside another
dynamic loop is rejected outright. Programs that survive are spot-checked
by the interpreter's termination probe before they enter the dataset.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

from .catalog import Catalog, CatalogEntry, candidates_for, default_catalog, validate_catalog
from .errors import GenerationError, InstantiationError
from .interp import check_termination
from .model import (
    Assign,
    BinOp,
    Comparison,
    ComplexityLevel,
    CountedBound,
    Lit,
    Loop,
    ProgramSpec,
    StructureCategory,
    Var,
    classify_complexity,
    iter_statements,
    validate_program,
)
from .render import Dialect, render, sloc
from .templates import (
    ACCEPT_ASSIGN,
    ACCEPT_LOOP_BOUND,
    ACCEPT_PREDICATE,
    Hole,
    LoopGroup,
    Template,
    assemble,
    builtin_templates,
)

ALL_CATEGORIES = tuple(StructureCategory)

DEFAULT_LIMIT_PER_CATEGORY = 20

# Enumerating a filtered space requires walking it; refuse absurd catalogs.
_FILTERED_SPACE_CAP = 1_000_000

_TERMINATION_SPOT_SAMPLES = 64


@dataclass(frozen=True)
class GenerationConfig:
    catalog: Catalog | None = None
    categories: tuple[StructureCategory, ...] = ALL_CATEGORIES
    max_complexity: ComplexityLevel = ComplexityLevel.MID
    limit_per_category: int = DEFAULT_LIMIT_PER_CATEGORY
    category_limits: tuple[tuple[StructureCategory, int], ...] = ()
    seed: int = 0

    def limit_for(self, category: StructureCategory) -> int:
        for cat, limit in self.category_limits:
            if cat is category:
                return limit
        return self.limit_per_category

    def resolved_catalog(self) -> Catalog:
        return self.catalog if self.catalog is not None else default_catalog()


@dataclass(frozen=True)
class CategoryStats:
    category: StructureCategory
    count: int
    coverage: float
    avg_sloc: float


@dataclass(frozen=True)
class DatasetStats:
    dialect: Dialect
    total: int
    categories: tuple[CategoryStats, ...]


@dataclass(frozen=True)
class Dataset:
    programs: tuple[ProgramSpec, ...]
    config_fingerprint: str
    stats: DatasetStats | None = field(repr=False, default=None)

    def by_id(self) -> dict[str, ProgramSpec]:
        return {p.id: p for p in self.programs}


# --- instantiation ------------------------------------------------------------


_ACCEPTED_PAYLOADS = {
    ACCEPT_ASSIGN: lambda payload: isinstance(payload, Assign),
    ACCEPT_PREDICATE: lambda payload: not isinstance(payload, (Assign, CountedBound)),
    ACCEPT_LOOP_BOUND: lambda payload: not isinstance(payload, Assign),
}


def _check_entry_fits(hole: Hole, entry: CatalogEntry) -> None:
    if entry.placeholder not in hole.kinds:
        kinds = "/".join(k.value for k in hole.kinds)
        raise InstantiationError(
            f"entry {entry.id} has kind {entry.placeholder.value}, "
            f"hole {hole.name!r} takes {kinds}"
        )
    if not _ACCEPTED_PAYLOADS[hole.accepts](entry.payload):
        raise InstantiationError(
            f"entry {entry.id} payload does not fit hole {hole.name!r} ({hole.accepts})"
        )


def program_id(category: StructureCategory, binding: Mapping[str, str]) -> str:
    """Stable program id: a digest of the category and the sorted binding."""
    canon = category.value + "|" + "|".join(
        f"{hole}={entry}" for hole, entry in sorted(binding.items())
    )
    digest = hashlib.sha256(canon.encode()).hexdigest()[:12]
    return f"{category.value.lower()}-{digest}"


def instantiate(t: Template, binding: Mapping[str, CatalogEntry]) -> ProgramSpec:
    """Fill every hole of a template from a binding; same inputs, same program."""
    hole_names = {h.name for h in t.holes}
    extras = sorted(set(binding) - hole_names)
    if extras:
        raise InstantiationError(f"binding names unknown hole {extras[0]!r}")
    for hole in t.holes:
        if hole.name not in binding:
            kinds = "/".join(k.value for k in hole.kinds)
            raise InstantiationError(f"unbound placeholder {kinds} (hole {hole.name!r})")
        _check_entry_fits(hole, binding[hole.name])

    payloads = {name: entry.payload for name, entry in binding.items()}
    body = assemble(t, payloads)
    ids = {name: entry.id for name, entry in binding.items()}
    spec = ProgramSpec(
        id=program_id(t.category, ids),
        category=t.category,
        params=t.params,
        body=body,
        binding=tuple(sorted(ids.items())),
    )
    spec = replace(spec, complexity=classify_complexity(spec))
    issues = validate_program(spec)
    if issues:
        raise InstantiationError(
            f"binding {dict(sorted(ids.items()))} produced an invalid program: "
            + "; ".join(issues)
        )
    return spec


# --- termination progress rule -------------------------------------------------


def _exit_move(bound) -> tuple[str, str] | None:
    """For a dynamic bound, which variable must move and how, or None if the
    bound can never be paired safely."""
    if not isinstance(bound, Comparison):
        return None
    left, right = bound.left, bound.right
    if isinstance(left, Var) and isinstance(right, Lit):
        var, op = left.name, bound.op
    elif isinstance(left, Lit) and isinstance(right, Var):
        flipped = {">": "<", "<": ">", ">=": "<=", "<=": ">=", "==": "==", "!=": "!="}
        var, op = right.name, flipped[bound.op]
    else:
        return None
    if op == "!=":
        return None  # no body guarantees hitting the constant exactly
    return var, op


def _assign_delta(a: Assign) -> int | None:
    """The constant step an assignment applies to its own variable, if it has
    the shape v = v + k or v = v - k."""
    e = a.expr
    if (
        isinstance(e, BinOp)
        and e.op in ("+", "-")
        and isinstance(e.left, Var)
        and e.left.name == a.var
        and isinstance(e.right, Lit)
    ):
        return e.right.value if e.op == "+" else -e.right.value
    return None


def _moves_toward_exit(op: str, delta: int) -> bool:
    if op in (">", ">="):
        return delta < 0
    if op in ("<", "<="):
        return delta > 0
    if op == "==":
        return delta != 0
    return False


def _group_terminates(group: LoopGroup, binding: Mapping[str, CatalogEntry]) -> bool:
    bound = binding[group.bound].payload
    if isinstance(bound, CountedBound):
        if group.inner is not None:
            return _group_terminates(group.inner, binding)
        return True

    move = _exit_move(bound)
    if move is None:
        return False
    var, op = move

    deltas: list[int] = []

    def collect(hole_names: tuple[str, ...]) -> bool:
        for name in hole_names:
            payload = binding[name].payload
            if isinstance(payload, Assign) and payload.var == var:
                d = _assign_delta(payload)
                if d is None:
                    return False  # loop variable updated in a non-monotone way
                deltas.append(d)
        return True

    if not collect(group.body):
        return False
    if group.inner is not None:
        inner_bound = binding[group.inner.bound].payload
        if not isinstance(inner_bound, CountedBound):
            return False  # dynamic inside dynamic: inner may never run
        if not collect(group.inner.body):
            return False
    if not deltas:
        return False
    return all(_moves_toward_exit(op, d) for d in deltas)


def _binding_terminates(t: Template, binding: Mapping[str, CatalogEntry]) -> bool:
    return all(_group_terminates(g, binding) for g in t.loop_groups)


# --- enumeration ---------------------------------------------------------------


def _hole_pool(
    hole: Hole, catalog: Catalog, max_level: ComplexityLevel
) -> list[CatalogEntry]:
    pool: list[CatalogEntry] = []
    for kind in hole.kinds:
        pool.extend(candidates_for(catalog, kind, max_level))
    pool = [e for e in pool if _ACCEPTED_PAYLOADS[hole.accepts](e.payload)]
    pool.sort(key=lambda e: e.id)
    if not pool:
        kinds = "/".join(k.value for k in hole.kinds)
        raise GenerationError(
            f"catalog has no candidates for hole {hole.name!r} (kinds {kinds})"
        )
    return pool


def _sample_indices(count: int, k: int, seed: int, key: str) -> list[int]:
    if k > count:
        raise ValueError(f"cannot sample {k} of {count}")
    chosen: set[int] = set()
    j = 0
    while len(chosen) < k:
        digest = hashlib.sha256(f"{seed}|{key}|{j}".encode()).digest()
        chosen.add(int.from_bytes(digest[:8], "big") % count)
        j += 1
    return sorted(chosen)


def enumerate_bindings(
    t: Template, c: Catalog, cfg: GenerationConfig
) -> list[dict[str, CatalogEntry]]:
    """Lexicographic binding stream for one template, down-sampled to the
    category limit when the space is larger."""
    limit = cfg.limit_for(t.category)
    if limit < 1:
        raise GenerationError(f"limit for {t.category.value} must be >= 1, got {limit}")
    pools = [_hole_pool(h, c, cfg.max_complexity) for h in t.holes]
    names = [h.name for h in t.holes]
    count = math.prod(len(p) for p in pools)

    if not t.loop_groups:
        if count <= limit:
            indices = range(count)
        else:
            indices = _sample_indices(count, limit, cfg.seed, t.category.value)
        return [_decode(i, names, pools) for i in indices]

    if count > _FILTERED_SPACE_CAP:
        raise GenerationError(
            f"{t.category.value}: candidate space of {count} combinations is too "
            "large to filter; narrow the catalog or lower max complexity"
        )
    valid = [
        dict(zip(names, combo))
        for combo in itertools.product(*pools)
        if _binding_terminates(t, dict(zip(names, combo)))
    ]
    if len(valid) <= limit:
        return valid
    picks = _sample_indices(len(valid), limit, cfg.seed, t.category.value)
    return [valid[i] for i in picks]


def _decode(index: int, names: list[str], pools: list[list[CatalogEntry]]) -> dict:
    binding = {}
    for name, pool in zip(reversed(names), reversed(pools)):
        index, r = divmod(index, len(pool))
        binding[name] = pool[r]
    return {name: binding[name] for name in names}


# --- dataset -------------------------------------------------------------------


def _has_dynamic_loop(p: ProgramSpec) -> bool:
    return any(
        isinstance(s, Loop) and not isinstance(s.bound, CountedBound)
        for s in iter_statements(p.body)
    )


def config_fingerprint(cfg: GenerationConfig) -> str:
    catalog = cfg.resolved_catalog()
    payload = {
        "categories": [c.value for c in cfg.categories],
        "max_complexity": cfg.max_complexity.label,
        "limit_per_category": cfg.limit_per_category,
        "category_limits": {c.value: n for c, n in cfg.category_limits},
        "seed": cfg.seed,
        "catalog_version": catalog.version,
        "catalog_entries": [e.id for e in catalog.entries],
    }
    blob = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def generate_dataset(cfg: GenerationConfig) -> Dataset:
    """Build the full dataset for a config; a pure function of the config."""
    if not cfg.categories:
        raise GenerationError("no categories enabled")
    catalog = cfg.resolved_catalog()
    issues = validate_catalog(catalog)
    if issues:
        raise GenerationError("invalid catalog: " + "; ".join(issues))

    wanted = set(cfg.categories)
    templates = [t for t in builtin_templates() if t.category in wanted]
    programs: list[ProgramSpec] = []
    for t in sorted(templates, key=lambda t: t.category.value):
        for binding in enumerate_bindings(t, catalog, cfg):
            program = instantiate(t, binding)
            if _has_dynamic_loop(program):
                report = check_termination(
                    program, samples=_TERMINATION_SPOT_SAMPLES
                )
                if not report.passed:
                    raise GenerationError(
                        f"binding {dict(sorted(program.binding))} for "
                        f"{t.category.value} failed the termination probe on "
                        f"inputs {report.counterexample}"
                    )
            programs.append(program)

    programs.sort(key=lambda p: p.id)
    ids = [p.id for p in programs]
    if len(set(ids)) != len(ids):
        raise GenerationError("duplicate program ids in generated dataset")

    stats = _stats_for(programs, Dialect.PYTHON)
    return Dataset(
        programs=tuple(programs),
        config_fingerprint=config_fingerprint(cfg),
        stats=stats,
    )


def dataset_stats(d: Dataset, dialect: Dialect = Dialect.PYTHON) -> DatasetStats:
    return _stats_for(list(d.programs), dialect)


def _stats_for(programs: list[ProgramSpec], dialect: Dialect) -> DatasetStats:
    if not programs:
        raise GenerationError("cannot compute statistics for an empty dataset")
    total = len(programs)
    rows = []
    by_cat: dict[StructureCategory, list[ProgramSpec]] = {}
    for p in programs:
        by_cat.setdefault(p.category, []).append(p)
    for category in sorted(by_cat, key=lambda c: c.display_name):
        members = by_cat[category]
        slocs = [sloc(render(p, dialect)) for p in members]
        rows.append(
            CategoryStats(
                category=category,
                count=len(members),
                coverage=len(members) / total,
                avg_sloc=sum(slocs) / len(slocs),
            )
        )
    return DatasetStats(dialect=dialect, total=total, categories=tuple(rows))
