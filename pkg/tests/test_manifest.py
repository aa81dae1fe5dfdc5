"""Manifest ingestion: schema enforcement, diagnostics, slack warnings."""

import json

import pytest

from mapmetrics.geometry import ElementKind
from mapmetrics.manifest import load_manifest


def write_manifest(tmp_path, lines):
    path = tmp_path / "manifest.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def record_line(**overrides):
    obj = {
        "map_id": "r1",
        "image_path": "images/r1.png",
        "mask_path": None,
        "language": "zh",
        "journal": "A",
        "year": 2001,
        "elements": [{"kind": "main_map",
                      "box": {"cx": 0.5, "cy": 0.5, "w": 0.8, "h": 0.7,
                              "theta": 0.0}}],
    }
    obj.update(overrides)
    return json.dumps(obj)


class TestLoadManifest:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        records, diagnostics = load_manifest(path)
        assert records == [] and diagnostics == []

    def test_single_valid_line(self, tmp_path):
        path = write_manifest(tmp_path, [record_line()])
        records, diagnostics = load_manifest(path)
        assert len(records) == 1 and not diagnostics
        record = records[0]
        assert record.map_id == "r1"
        assert record.language == "zh"
        assert record.image_path == tmp_path / "images/r1.png"
        assert record.mask_path is None
        assert record.element_kinds == frozenset({ElementKind.MAIN_MAP})

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_manifest(tmp_path / "absent.jsonl")

    def test_two_main_maps_rejected(self, tmp_path):
        main = {"kind": "main_map",
                "box": {"cx": 0.5, "cy": 0.5, "w": 0.5, "h": 0.5, "theta": 0}}
        path = write_manifest(tmp_path, [record_line(elements=[main, main])])
        records, diagnostics = load_manifest(path)
        assert records == []
        assert len(diagnostics) == 1
        assert diagnostics[0].severity == "error"
        assert "multiple main maps" in diagnostics[0].message

    def test_no_main_map_rejected(self, tmp_path):
        legend = {"kind": "legend",
                  "box": {"cx": 0.5, "cy": 0.5, "w": 0.2, "h": 0.2, "theta": 0}}
        path = write_manifest(tmp_path, [record_line(elements=[legend])])
        records, diagnostics = load_manifest(path)
        assert records == []
        assert "no main map" in diagnostics[0].message

    def test_line_numbers_in_diagnostics(self, tmp_path):
        path = write_manifest(tmp_path, [
            record_line(),
            "not json at all {",
            record_line(map_id="r3", language="fr"),
        ])
        records, diagnostics = load_manifest(path)
        assert [r.map_id for r in records] == ["r1"]
        assert [d.line for d in diagnostics] == [2, 3]

    def test_year_range_configurable(self, tmp_path):
        path = write_manifest(tmp_path, [record_line(year=1950)])
        records, diagnostics = load_manifest(path)
        assert not records and "year 1950" in diagnostics[0].message
        records, diagnostics = load_manifest(path, year_range=(1940, 2020))
        assert len(records) == 1 and not diagnostics

    def test_theta_defaults_to_zero(self, tmp_path):
        el = {"kind": "main_map", "box": {"cx": 0.5, "cy": 0.5, "w": 0.5, "h": 0.5}}
        path = write_manifest(tmp_path, [record_line(elements=[el])])
        records, _ = load_manifest(path)
        assert records[0].main_box.theta == 0.0

    def test_overshoot_within_slack_warns_but_keeps(self, tmp_path):
        el = [{"kind": "main_map",
               "box": {"cx": 0.5, "cy": 0.5, "w": 0.8, "h": 0.7, "theta": 0}},
              {"kind": "scale_bar",
               "box": {"cx": 0.99, "cy": 0.9, "w": 0.06, "h": 0.04, "theta": 0}}]
        path = write_manifest(tmp_path, [record_line(elements=el)])
        records, diagnostics = load_manifest(path)
        assert len(records) == 1
        assert diagnostics[0].severity == "warning"
        assert "within slack" in diagnostics[0].message

    def test_overshoot_beyond_slack_rejects(self, tmp_path):
        el = [{"kind": "main_map",
               "box": {"cx": 0.5, "cy": 0.5, "w": 0.8, "h": 0.7, "theta": 0}},
              {"kind": "legend",
               "box": {"cx": 0.99, "cy": 0.9, "w": 0.4, "h": 0.1, "theta": 0}}]
        path = write_manifest(tmp_path, [record_line(elements=el)])
        records, diagnostics = load_manifest(path)
        assert not records
        assert diagnostics[0].severity == "error"

    def test_duplicate_map_id_rejected(self, tmp_path):
        path = write_manifest(tmp_path, [record_line(), record_line()])
        records, diagnostics = load_manifest(path)
        assert len(records) == 1
        assert "duplicate map_id" in diagnostics[0].message

    @pytest.mark.parametrize("field,value,fragment", [
        ("language", "de", "language"),
        ("journal", "", "journal"),
        ("year", "2001", "year"),
        ("map_id", "", "map_id"),
        ("elements", [], "elements"),
    ])
    def test_field_validation(self, tmp_path, field, value, fragment):
        path = write_manifest(tmp_path, [record_line(**{field: value})])
        records, diagnostics = load_manifest(path)
        assert not records
        assert fragment in diagnostics[0].message

    def test_fixture_corpus_loads_clean(self, manifest_path):
        records, diagnostics = load_manifest(manifest_path)
        assert len(records) == 20
        # the only diagnostic is m16's tolerated overshoot warning
        assert [d.severity for d in diagnostics] == ["warning"]
        assert diagnostics[0].map_id == "m16"

    def test_bad_manifest_fixture(self, bad_manifest_path):
        records, diagnostics = load_manifest(bad_manifest_path)
        assert [r.map_id for r in records] == ["ok1", "warn_overshoot"]
        errors = [d for d in diagnostics if d.severity == "error"]
        warnings = [d for d in diagnostics if d.severity == "warning"]
        assert len(errors) == 6  # bad json, 2x main, kind, year, slack, dup id
        assert len(warnings) == 1
