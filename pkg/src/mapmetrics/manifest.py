"""Corpus manifest ingestion.

The manifest is JSON-Lines, one object per map:

    {"map_id": str, "image_path": str, "mask_path": str|null,
     "language": "zh"|"en", "journal": str, "year": int,
     "elements": [{"kind": str, "box": {"cx": f, "cy": f, "w": f,
                                        "h": f, "theta": f}}]}

Relative image/mask paths resolve against the manifest's directory.
Malformed lines never drop silently: every problem becomes a Diagnostic
with its line number. A record is rejected on structural errors (bad
JSON, unknown kind, no/multiple main maps, out-of-range year, boxes
beyond the page slack) and kept with a warning when a box merely
overshoots the page within the tolerated slack.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .geometry import PAGE_SLACK, ElementKind, MapElement, OrientedBox

LANGUAGES = ("zh", "en")
DEFAULT_YEAR_RANGE = (1990, 2020)


@dataclass(frozen=True)
class MapRecord:
    """One annotated map with its corpus metadata."""

    map_id: str
    image_path: Path
    mask_path: Path | None
    language: str
    journal: str
    year: int
    elements: tuple[MapElement, ...]

    @property
    def element_kinds(self) -> frozenset[ElementKind]:
        return frozenset(e.kind for e in self.elements)

    @property
    def main_box(self) -> OrientedBox:
        return next(e.box for e in self.elements if e.kind is ElementKind.MAIN_MAP)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    map_id: str | None
    severity: str  # "error" rejects the record, "warning" keeps it
    message: str


class SchemaViolation(ValueError):
    """Internal: one record field failed validation."""


def _require(obj: dict, key: str, kind, label: str):
    if key not in obj:
        raise SchemaViolation(f"missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise SchemaViolation(f"field {key!r} must be {label}")
    return value


def _number(obj: dict, key: str) -> float:
    value = _require(obj, key, (int, float), "a number")
    return float(value)


def _parse_record(obj: dict, base: Path,
                  year_range: tuple[int, int]) -> tuple[MapRecord, list[str]]:
    """Build a MapRecord from one manifest object; returns warnings."""
    if not isinstance(obj, dict):
        raise SchemaViolation("line is not a JSON object")
    map_id = _require(obj, "map_id", str, "a string")
    if not map_id:
        raise SchemaViolation("map_id must be nonempty")
    image_path = _require(obj, "image_path", str, "a string")
    mask_path = obj.get("mask_path")
    if mask_path is not None and (isinstance(mask_path, bool)
                                  or not isinstance(mask_path, str)):
        raise SchemaViolation("field 'mask_path' must be a string or null")
    language = _require(obj, "language", str, "a string")
    if language not in LANGUAGES:
        raise SchemaViolation(f"language must be one of {LANGUAGES}, got {language!r}")
    journal = _require(obj, "journal", str, "a string")
    if not journal:
        raise SchemaViolation("journal must be nonempty")
    year = _require(obj, "year", int, "an integer")
    if not year_range[0] <= year <= year_range[1]:
        raise SchemaViolation(
            f"year {year} outside corpus range {year_range[0]}-{year_range[1]}")

    raw_elements = _require(obj, "elements", list, "a list")
    if not raw_elements:
        raise SchemaViolation("elements must be nonempty")
    warnings: list[str] = []
    elements: list[MapElement] = []
    for pos, raw in enumerate(raw_elements):
        if not isinstance(raw, dict):
            raise SchemaViolation(f"elements[{pos}] is not an object")
        try:
            kind = ElementKind.from_label(_require(raw, "kind", str, "a string"))
        except ValueError as exc:
            raise SchemaViolation(f"elements[{pos}]: {exc}") from None
        raw_box = _require(raw, "box", dict, "an object")
        try:
            box = OrientedBox(
                cx=_number(raw_box, "cx"),
                cy=_number(raw_box, "cy"),
                w=_number(raw_box, "w"),
                h=_number(raw_box, "h"),
                theta=float(raw_box.get("theta", 0.0)),
            )
        except (SchemaViolation, ValueError) as exc:
            raise SchemaViolation(f"elements[{pos}]: {exc}") from None
        overshoot = box.page_overshoot()
        if overshoot > PAGE_SLACK:
            raise SchemaViolation(
                f"elements[{pos}]: box corners overshoot the page by "
                f"{overshoot:.4f} (> {PAGE_SLACK} slack)")
        if overshoot > 0.0:
            warnings.append(
                f"elements[{pos}]: box overshoots the page by {overshoot:.4f} "
                f"(within slack, kept)")
        elements.append(MapElement(kind=kind, box=box))

    mains = sum(1 for e in elements if e.kind is ElementKind.MAIN_MAP)
    if mains == 0:
        raise SchemaViolation("no main map element")
    if mains > 1:
        raise SchemaViolation("multiple main maps")

    record = MapRecord(
        map_id=map_id,
        image_path=base / image_path,
        mask_path=(base / mask_path) if mask_path else None,
        language=language,
        journal=journal,
        year=year,
        elements=tuple(elements),
    )
    return record, warnings


def load_manifest(path, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
                  ) -> tuple[list[MapRecord], list[Diagnostic]]:
    """Parse a JSON-Lines manifest into records plus diagnostics.

    Raises FileNotFoundError when the manifest itself is unreadable; per
    line problems are collected, never fatal here (the CLI's --strict mode
    decides whether they fail the run).
    """
    manifest = Path(path)
    base = manifest.parent
    records: list[MapRecord] = []
    diagnostics: list[Diagnostic] = []
    seen_ids: set[str] = set()
    with open(manifest, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                diagnostics.append(Diagnostic(
                    line_no, None, "error", f"invalid JSON: {exc.msg}"))
                continue
            map_id = obj.get("map_id") if isinstance(obj, dict) else None
            if not isinstance(map_id, str):
                map_id = None
            try:
                record, warnings = _parse_record(obj, base, year_range)
            except SchemaViolation as exc:
                diagnostics.append(Diagnostic(line_no, map_id, "error", str(exc)))
                continue
            if record.map_id in seen_ids:
                diagnostics.append(Diagnostic(
                    line_no, record.map_id, "error",
                    f"duplicate map_id {record.map_id!r}"))
                continue
            seen_ids.add(record.map_id)
            for message in warnings:
                diagnostics.append(Diagnostic(line_no, record.map_id,
                                              "warning", message))
            records.append(record)
    return records, diagnostics
