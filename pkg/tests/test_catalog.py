"""Catalog contents, candidate filtering, file round trips, fragments."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings

from flowbench.catalog import (
    Catalog,
    candidates_for,
    default_catalog,
    entry_issues,
    load_catalog,
    save_catalog,
    validate_catalog,
)
from flowbench.errors import CatalogError, CatalogParseError, FragmentParseError
from flowbench.fragments import parse_assign, parse_expr, parse_loop_bound, parse_predicate
from flowbench.model import ComplexityLevel, CountedBound, PlaceholderKind
from flowbench.render import render_expr, render_fragment, render_predicate

from .strategies import assigns, exprs, predicates


class TestDefaultCatalog:
    def test_x_p_use_includes_gt5(self, catalog):
        ids = {
            render_fragment(e.payload)
            for e in candidates_for(catalog, PlaceholderKind.X_P_USE)
        }
        assert "x > 5" in ids
        assert "x == 15" in ids

    def test_y_c_use_includes_add7(self, catalog):
        texts = {
            render_fragment(e.payload)
            for e in candidates_for(catalog, PlaceholderKind.Y_C_USE)
        }
        assert texts == {"y = y + 7", "y = y - 7"}

    def test_every_entry_payload_matches_its_kind(self, catalog):
        assert validate_catalog(catalog) == []

    def test_deterministic_and_version_stamped(self):
        a, b = default_catalog(), default_catalog()
        assert a == b
        assert a.version

    def test_loop_bounds_present(self, catalog):
        pool = candidates_for(catalog, PlaceholderKind.Y_P_USE)
        bounds = [e for e in pool if isinstance(e.payload, CountedBound)]
        assert [e.payload.count for e in bounds] == [3]
        dynamic = [e for e in pool if not isinstance(e.payload, CountedBound)]
        assert len(dynamic) == 6

    def test_compound_entries_cover_and_or(self, catalog):
        texts = {
            render_fragment(e.payload)
            for e in candidates_for(catalog, PlaceholderKind.COMPOUND_PREDICATE)
        }
        assert "x > 5 and y > 10" in texts
        assert "x == 5 or y == 10" in texts


class TestCandidatesFor:
    def test_defs_unfiltered_at_low(self, catalog):
        pool = candidates_for(catalog, PlaceholderKind.X_DEF, ComplexityLevel.LOW)
        assert [e.id for e in pool] == ["xdef-05", "xdef-15"]

    def test_compounds_gated_behind_mid(self, catalog):
        assert candidates_for(
            catalog, PlaceholderKind.COMPOUND_PREDICATE, ComplexityLevel.LOW
        ) == []
        assert candidates_for(
            catalog, PlaceholderKind.COMPOUND_PREDICATE, ComplexityLevel.MID
        ) != []

    def test_empty_catalog(self):
        empty = Catalog(entries=(), version="empty")
        assert candidates_for(empty, PlaceholderKind.X_P_USE) == []

    def test_unknown_kind_rejected(self, catalog):
        with pytest.raises(CatalogError, match="unknown placeholder kind"):
            candidates_for(catalog, "not-a-kind")

    def test_accepts_kind_names(self, catalog):
        assert candidates_for(catalog, "xdef") == candidates_for(
            catalog, PlaceholderKind.X_DEF
        )

    def test_stable_order(self, catalog):
        pool = candidates_for(catalog, PlaceholderKind.X_P_USE)
        assert [e.id for e in pool] == sorted(e.id for e in pool)


class TestCatalogFiles:
    def test_round_trip(self, catalog, tmp_path):
        path = tmp_path / "catalog.jsonl"
        save_catalog(catalog, path)
        assert load_catalog(path) == catalog

    def test_malformed_line_names_position(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        path.write_text('{"version": "v"}\n{not json\n', encoding="utf-8")
        with pytest.raises(CatalogParseError, match="line 2"):
            load_catalog(path)

    def test_bad_fragment_names_entry(self, tmp_path):
        path = tmp_path / "badfrag.jsonl"
        record = {"id": "weird", "placeholder": "xpuse", "payload": "x >> 5",
                  "tags": [], "level": "Low"}
        path.write_text(
            '{"version": "v"}\n' + json.dumps(record) + "\n", encoding="utf-8"
        )
        with pytest.raises(CatalogParseError, match="weird"):
            load_catalog(path)

    def test_duplicate_ids_rejected(self, tmp_path):
        record = {"id": "dup", "placeholder": "xdef", "payload": "x = 5",
                  "tags": [], "level": "Low"}
        path = tmp_path / "dup.jsonl"
        path.write_text(
            '{"version": "v"}\n' + json.dumps(record) + "\n" + json.dumps(record) + "\n",
            encoding="utf-8",
        )
        with pytest.raises(CatalogError, match="duplicate"):
            load_catalog(path)

    def test_missing_header_rejected(self, tmp_path):
        record = {"id": "a", "placeholder": "xdef", "payload": "x = 5",
                  "tags": [], "level": "Low"}
        path = tmp_path / "nohdr.jsonl"
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(CatalogParseError, match="version"):
            load_catalog(path)

    def test_kind_mismatch_reported(self, catalog):
        from dataclasses import replace

        wrong = replace(
            [e for e in catalog.entries if e.id == "xdef-05"][0],
            placeholder=PlaceholderKind.X_P_USE,
        )
        assert entry_issues(wrong)


class TestFragments:
    @pytest.mark.parametrize(
        "text",
        ["x = x + 10", "x = x * 7", "x = x + y - 7", "y = 7", "x = 15"],
    )
    def test_assign_round_trip(self, text):
        assert render_fragment(parse_assign(text)) == text

    @pytest.mark.parametrize(
        "text",
        ["x > 5", "y == 10", "x % 2 == 0", "x + y > 5",
         "x > 5 and y > 10", "x == 5 or y == 10",
         "x >= 18 and y < 5 and x <= 100"],
    )
    def test_predicate_round_trip(self, text):
        assert render_predicate(parse_predicate(text)) == text

    def test_counted_bound_fragment(self):
        assert parse_loop_bound("3") == CountedBound(3)
        assert render_fragment(CountedBound(3)) == "3"

    def test_grouped_or_inside_and(self):
        pred = parse_predicate("(x > 5 or y > 10) and x < 15")
        assert render_predicate(pred) == "(x > 5 or y > 10) and x < 15"
        assert parse_predicate(render_predicate(pred)) == pred

    def test_grouped_expression_comparison(self):
        pred = parse_predicate("(x + y) % 2 == 0")
        assert parse_predicate(render_predicate(pred)) == pred

    def test_parse_error_carries_position(self):
        with pytest.raises(FragmentParseError) as exc:
            parse_expr("x + $")
        assert exc.value.pos == 4

    def test_trailing_input_rejected(self):
        with pytest.raises(FragmentParseError, match="trailing"):
            parse_assign("x = 5 y")

    def test_catalog_payloads_round_trip(self, catalog):
        for e in catalog.entries:
            text = render_fragment(e.payload)
            if isinstance(e.payload, CountedBound):
                assert parse_loop_bound(text) == e.payload
            elif hasattr(e.payload, "var"):
                assert parse_assign(text) == e.payload
            else:
                assert parse_predicate(text) == e.payload

    @given(exprs())
    @settings(max_examples=100, deadline=None)
    def test_expr_round_trip_property(self, e):
        assert parse_expr(render_expr(e)) == e

    @given(predicates())
    @settings(max_examples=100, deadline=None)
    def test_predicate_round_trip_property(self, p):
        assert parse_predicate(render_predicate(p)) == p

    @given(assigns)
    @settings(max_examples=50, deadline=None)
    def test_assign_round_trip_property(self, a):
        assert parse_assign(render_fragment(a)) == a
