"""Per-map metric computation and corpus-level aggregation.

analyze_map composes the color and layout analyses over one record and
never throws for bad inputs: problems become Failure entries and the map
keeps whatever metrics are still computable (layout needs no pixels). A
missing or unusable mask falls back to the main-map box, flagged, so
corpus coverage survives imperfect segmentations.

Parallelism is a bounded thread pool; results are sorted by map_id after
collection, which makes every downstream output independent of worker
count and scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy.ndimage import binary_erosion

from .color import ColorConfig, ColorProfile, HueCategory, color_profile
from .errors import EmptyGroupError, EmptyMaskError, InsufficientYearsError
from .geometry import ElementKind, OrientedBox
from .layout import LayoutConfig, LayoutProfile, layout_profile
from .manifest import MapRecord
from .masks import refine_main_mask
from .stats import CorrelationResult, TestResult, mann_whitney_u, spearman

NEUTRAL_HUES = frozenset((HueCategory.BLACK, HueCategory.GRAY, HueCategory.WHITE))

# canonical failure reasons; library exception text never reaches reports
REASON_IMAGE_DECODE = "image decode failed"
REASON_MASK_DECODE = "mask decode failed"
REASON_MASK_DIMENSIONS = "mask dimensions differ from image"
REASON_MASK_EMPTY = "mask has no foreground"
REASON_ERODED_EMPTY = "mask empty after erosion"
REASON_REGION_EMPTY = "main-map region selects no pixels"


@dataclass(frozen=True)
class AnalysisConfig:
    color: ColorConfig = ColorConfig()
    layout: LayoutConfig = LayoutConfig()
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class Failure:
    map_id: str
    stage: str
    reason: str


@dataclass(frozen=True)
class MapMetrics:
    """Everything measured on one map. ``color`` is None when the image
    (or its mask) could not produce pixels, recorded as a Failure."""

    map_id: str
    language: str
    journal: str
    year: int
    element_count: int
    present_kinds: frozenset[ElementKind]
    color: ColorProfile | None
    layout: LayoutProfile
    mask_used: bool
    flags: tuple[str, ...]

    def element_presence(self) -> dict[ElementKind, bool]:
        return {kind: kind in self.present_kinds for kind in ElementKind}


def _load_image(path) -> tuple[np.ndarray, np.ndarray]:
    """Decode to an (H, W, 3) uint8 RGB array plus its alpha plane."""
    try:
        with Image.open(path) as img:
            rgba = np.asarray(img.convert("RGBA"))
    except (OSError, UnidentifiedImageError, ValueError):
        raise OSError(REASON_IMAGE_DECODE) from None
    return rgba[:, :, :3], rgba[:, :, 3]


def _load_mask(path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            plane = np.asarray(img.convert("L"))
    except (OSError, UnidentifiedImageError, ValueError):
        raise OSError(REASON_MASK_DECODE) from None
    return plane > 0


def rasterize_box(box: OrientedBox, width: int, height: int) -> np.ndarray:
    """Pixels whose centers fall inside the oriented box, on a page grid.

    Uses the same pixel-center convention as mask_centroid, so box-derived
    and mask-derived measurements share one coordinate system.
    """
    xs = (np.arange(width) + 0.5) / width
    ys = (np.arange(height) + 0.5) / height
    px, py = np.meshgrid(xs, ys)
    dx = px - box.cx
    dy = py - box.cy
    c, s = box._trig()
    u = dx * c + dy * s
    v = -dx * s + dy * c
    return (np.abs(u) <= box.w / 2.0) & (np.abs(v) <= box.h / 2.0)


def analyze_map(record: MapRecord,
                config: AnalysisConfig = AnalysisConfig(),
                ) -> tuple[MapMetrics, list[Failure]]:
    """Compute color and layout metrics for one record.

    Deterministic: identical record and config give identical output.
    """
    failures: list[Failure] = []
    flags: list[str] = []

    rgb = alpha = None
    try:
        rgb, alpha = _load_image(record.image_path)
    except OSError as exc:
        failures.append(Failure(record.map_id, "image", str(exc)))

    refined = None
    if record.mask_path is None:
        flags.append("no-mask")
    elif rgb is None:
        flags.append("mask-unverifiable")
    else:
        try:
            raw = _load_mask(record.mask_path)
            if raw.shape != rgb.shape[:2]:
                raise OSError(REASON_MASK_DIMENSIONS)
            refined = refine_main_mask(raw)
        except EmptyMaskError:
            failures.append(Failure(record.map_id, "mask", REASON_MASK_EMPTY))
            flags.append("mask-fallback")
        except OSError as exc:
            failures.append(Failure(record.map_id, "mask", str(exc)))
            flags.append("mask-fallback")

    color = None
    if rgb is not None:
        if refined is not None:
            color_mask = refined
            if config.color.erosion_radius > 0:
                color_mask = binary_erosion(
                    color_mask,
                    structure=np.ones((3, 3), dtype=bool),
                    iterations=config.color.erosion_radius,
                )
        else:
            color_mask = rasterize_box(record.main_box, rgb.shape[1], rgb.shape[0])
        color_mask = color_mask & (alpha > 0)
        try:
            color = color_profile(rgb, color_mask, config.color)
        except EmptyMaskError:
            reason = (REASON_ERODED_EMPTY
                      if refined is not None and config.color.erosion_radius > 0
                      else REASON_REGION_EMPTY)
            failures.append(Failure(record.map_id, "color", reason))

    layout = layout_profile(list(record.elements), refined, config.layout)

    metrics = MapMetrics(
        map_id=record.map_id,
        language=record.language,
        journal=record.journal,
        year=record.year,
        element_count=len(record.elements),
        present_kinds=record.element_kinds,
        color=color,
        layout=layout,
        mask_used=refined is not None,
        flags=tuple(flags),
    )
    return metrics, failures


def analyze_corpus(records: list[MapRecord],
                   config: AnalysisConfig = AnalysisConfig(),
                   ) -> tuple[list[MapMetrics], list[Failure]]:
    """analyze_map over a corpus with a bounded worker pool; output sorted
    by map_id regardless of scheduling."""
    if config.workers == 1:
        results = [analyze_map(r, config) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda r: analyze_map(r, config), records))
    results.sort(key=lambda pair: pair[0].map_id)
    metrics = [m for m, _ in results]
    failures = [f for _, fs in results for f in fs]
    return metrics, failures


def _color_value(name: str) -> Callable[[MapMetrics], float | None]:
    def get(m: MapMetrics) -> float | None:
        if m.color is None:
            return None
        return float(getattr(m.color, name))
    return get


def _layout_value(getter: Callable[[LayoutProfile], float]) -> Callable[[MapMetrics], float]:
    return lambda m: float(getter(m.layout))


def _presence_value(kind: ElementKind) -> Callable[[MapMetrics], float]:
    return lambda m: 1.0 if kind in m.present_kinds else 0.0


def _chromatic_main(m: MapMetrics) -> float | None:
    if m.color is None:
        return None
    return 0.0 if m.color.h_main in NEUTRAL_HUES else 1.0


def _indicator_registry() -> dict[str, Callable[[MapMetrics], float | None]]:
    reg: dict[str, Callable[[MapMetrics], float | None]] = {
        "element_count": lambda m: float(m.element_count),
    }
    for kind in ElementKind:
        reg[f"presence_{kind.value}"] = _presence_value(kind)
    for name in ("s_ave", "b_ave", "b_con", "n_hue", "e_hue"):
        reg[name] = _color_value(name)
    reg["chromatic_main"] = _chromatic_main
    reg["d_hier"] = _layout_value(lambda l: l.d_hier)
    reg["r_map"] = _layout_value(lambda l: l.r_map)
    reg["r_horizontal"] = _layout_value(lambda l: l.alignment.r_horizontal)
    reg["r_vertical"] = _layout_value(lambda l: l.alignment.r_vertical)
    reg["b_horizontal"] = _layout_value(lambda l: l.balance.b_horizontal)
    reg["b_vertical"] = _layout_value(lambda l: l.balance.b_vertical)
    return reg


INDICATORS = _indicator_registry()

GROUP_FIELDS = ("language", "year", "journal")


@dataclass(frozen=True)
class IndicatorStats:
    mean: float
    median: float
    q1: float
    q3: float
    n: int


@dataclass(frozen=True)
class GroupSummary:
    """Per-group indicator statistics. ``count`` covers every record in
    the cell; each indicator's n covers only maps where it is defined."""

    language: str | None
    year: int | None
    journal: str | None
    count: int
    color_failures: int
    stats: dict[str, IndicatorStats]
    articles: int | None = None
    maps_per_article: float | None = None


def _summarize(values: list[float]) -> IndicatorStats:
    arr = np.asarray(values, dtype=np.float64)
    q1, median, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    return IndicatorStats(
        mean=math.fsum(values) / len(values),
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        n=len(values),
    )


def aggregate(metrics: list[MapMetrics], group_by: tuple[str, ...] = (),
              articles: dict[tuple, int] | None = None) -> list[GroupSummary]:
    """One summary per occupied group cell.

    group_by is any subset of (language, year, journal); empty means one
    global summary. The optional articles table (keyed by the group_by
    values, in order) fills the map-to-article ratio slot.
    """
    for field in group_by:
        if field not in GROUP_FIELDS:
            raise ValueError(f"cannot group by {field!r}")
    if not metrics:
        raise ValueError("metrics must be nonempty")

    cells: dict[tuple, list[MapMetrics]] = {}
    for m in metrics:
        key = tuple(getattr(m, field) for field in group_by)
        cells.setdefault(key, []).append(m)

    summaries = []
    for key in sorted(cells, key=lambda k: tuple(str(v) for v in k)):
        members = cells[key]
        stats = {}
        for name, get in INDICATORS.items():
            values = [v for v in (get(m) for m in members) if v is not None]
            if values:
                stats[name] = _summarize(values)
        fields = dict(zip(group_by, key))
        article_count = articles.get(key) if articles else None
        summaries.append(GroupSummary(
            language=fields.get("language"),
            year=fields.get("year"),
            journal=fields.get("journal"),
            count=len(members),
            color_failures=sum(1 for m in members if m.color is None),
            stats=stats,
            articles=article_count,
            maps_per_article=(len(members) / article_count
                              if article_count else None),
        ))
    return summaries


def cross_group_compare(metrics: list[MapMetrics], indicator: str,
                        split: str = "language") -> TestResult:
    """Mann-Whitney U between the two values of the split field (zh vs en
    for language), over per-map indicator values."""
    if split != "language":
        raise ValueError("only the language split is supported")
    get = INDICATORS[indicator]
    zh = [v for m in metrics if m.language == "zh"
          for v in [get(m)] if v is not None]
    en = [v for m in metrics if m.language == "en"
          for v in [get(m)] if v is not None]
    if not zh or not en:
        raise EmptyGroupError(
            f"indicator {indicator!r} has an empty group (zh={len(zh)}, en={len(en)})")
    return mann_whitney_u(zh, en)


def yearly_trend(metrics: list[MapMetrics], indicator: str, language: str,
                 unit: str = "annual-mean") -> CorrelationResult:
    """Spearman correlation of an indicator against publication year.

    The default unit correlates (year, annual mean) pairs; unit="map"
    correlates per-map values directly. Either way at least three distinct
    years must be present.
    """
    if unit not in ("annual-mean", "map"):
        raise ValueError(f"unknown trend unit {unit!r}")
    get = INDICATORS[indicator]
    pairs = [(m.year, v) for m in metrics if m.language == language
             for v in [get(m)] if v is not None]
    years = sorted({year for year, _ in pairs})
    if len(years) < 3:
        raise InsufficientYearsError(
            f"indicator {indicator!r} for {language!r} spans {len(years)} "
            f"year(s); need at least 3")
    if unit == "map":
        xs = [float(year) for year, _ in pairs]
        ys = [v for _, v in pairs]
    else:
        xs = [float(year) for year in years]
        ys = []
        for year in years:
            values = [v for y, v in pairs if y == year]
            ys.append(math.fsum(values) / len(values))
    return spearman(xs, ys)
