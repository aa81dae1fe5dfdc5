"""Layout indicators for one map page: hierarchy, compactness, alignment,
visual balance.

Everything works on the elements' axis-aligned envelopes in normalized
page coordinates, so the indicators are invariant under uniform page
rescaling. The main map participates in alignment and balance like any
other element.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import hypot, sqrt

from .errors import DegeneratePageError
from .geometry import AxisAlignedBox, ElementKind, MapElement, envelope, obb_area, obb_centroid
from .masks import as_mask, mask_area, mask_centroid

SIGHT_LINE_MODES = ("edges-and-center", "edges")
BALANCE_WEIGHT_MODES = ("moment", "area")


@dataclass(frozen=True)
class LayoutConfig:
    """Alignment tolerance and the two model choices the literature leaves
    open: which sight lines an element emits, and how side weights are
    formed (area times centroid lever arm, or area alone)."""

    tau: float = 0.01
    sight_lines: str = "edges-and-center"
    balance_weights: str = "moment"

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError("tau must be > 0")
        if self.sight_lines not in SIGHT_LINE_MODES:
            raise ValueError(f"sight_lines must be one of {SIGHT_LINE_MODES}")
        if self.balance_weights not in BALANCE_WEIGHT_MODES:
            raise ValueError(
                f"balance_weights must be one of {BALANCE_WEIGHT_MODES}")


DEFAULT_LAYOUT_CONFIG = LayoutConfig()


@dataclass(frozen=True)
class AlignmentDetail:
    """Misaligned sight-line ratios plus the raw counts behind them."""

    r_horizontal: float
    r_vertical: float
    misaligned_h: int
    total_h: int
    misaligned_v: int
    total_v: int


@dataclass(frozen=True)
class BalanceDetail:
    """Signed balance per axis plus the four side weights.

    b_horizontal compares top against bottom (positive = top-heavy);
    b_vertical compares left against right (positive = left-heavy).
    """

    b_horizontal: float
    b_vertical: float
    w_top: float
    w_bottom: float
    w_left: float
    w_right: float


@dataclass(frozen=True)
class LayoutProfile:
    d_hier: float
    r_map: float
    alignment: AlignmentDetail
    balance: BalanceDetail


def hierarchy_deviation(centroid: tuple[float, float]) -> float:
    """Deviation of the main map's centroid from the page center, rescaled
    to [0, 1]: 0 is perfect centering, 1 is a page corner."""
    dx = (centroid[0] - 0.5) / 0.5
    dy = (centroid[1] - 0.5) / 0.5
    return hypot(dx, dy) / sqrt(2.0)


def compactness(a_map: float, a_page: float) -> float:
    """Main-map area as a fraction of page area."""
    if a_page <= 0:
        raise DegeneratePageError("page area must be positive")
    if not 0 <= a_map <= a_page:
        raise ValueError(f"main-map area {a_map} outside [0, {a_page}]")
    return a_map / a_page


def _sight_lines(env: AxisAlignedBox, axis: int, mode: str) -> list[float]:
    if axis == 0:
        lines = [env.x_min, env.x_max]
        if mode == "edges-and-center":
            lines.insert(1, env.center[0])
    else:
        lines = [env.y_min, env.y_max]
        if mode == "edges-and-center":
            lines.insert(1, env.center[1])
    return lines


def _misaligned_count(lines: list[tuple[float, int]], tau: float) -> int:
    """Count lines whose tolerance cluster holds no line of another element.

    Lines are clustered greedily along the sorted coordinate: a gap larger
    than tau starts a new cluster.
    """
    lines = sorted(lines)
    misaligned = 0
    start = 0
    for i in range(1, len(lines) + 1):
        if i < len(lines) and lines[i][0] - lines[i - 1][0] <= tau:
            continue
        cluster = lines[start:i]
        owners = {owner for _, owner in cluster}
        if len(owners) < 2:
            misaligned += len(cluster)
        start = i
    return misaligned


def alignment(elements: list[MapElement],
              config: LayoutConfig = DEFAULT_LAYOUT_CONFIG) -> AlignmentDetail:
    """Misaligned share of sight lines per direction.

    Each element's envelope emits vertical lines (x positions) and
    horizontal lines (y positions); a line counts as aligned when some
    other element has a line within the clustering tolerance. A single
    element has nothing to align with, so both ratios are 0 by definition.
    """
    if len(elements) < 2:
        return AlignmentDetail(0.0, 0.0, 0, 0, 0, 0)
    vertical: list[tuple[float, int]] = []
    horizontal: list[tuple[float, int]] = []
    for idx, element in enumerate(elements):
        env = envelope(element.box)
        vertical.extend((x, idx) for x in _sight_lines(env, 0, config.sight_lines))
        horizontal.extend((y, idx) for y in _sight_lines(env, 1, config.sight_lines))
    mis_v = _misaligned_count(vertical, config.tau)
    mis_h = _misaligned_count(horizontal, config.tau)
    return AlignmentDetail(
        r_horizontal=mis_h / len(horizontal),
        r_vertical=mis_v / len(vertical),
        misaligned_h=mis_h,
        total_h=len(horizontal),
        misaligned_v=mis_v,
        total_v=len(vertical),
    )


def _side_weights(envs: list[AxisAlignedBox], axis: int,
                  mode: str) -> tuple[float, float]:
    """Weights on the two sides of the page midline along one axis.

    Elements spanning the midline are split by clipping, so the weights
    change continuously as an element slides across. In moment mode each
    clipped part weighs (area x centroid distance from the midline); in
    area mode the lever arm is dropped.
    """
    low_total = 0.0
    high_total = 0.0
    for env in envs:
        if axis == 1:
            lo, hi, breadth = env.y_min, env.y_max, env.width
        else:
            lo, hi, breadth = env.x_min, env.x_max, env.height
        low_end = min(hi, 0.5)
        if low_end > lo:
            area = breadth * (low_end - lo)
            lever = 0.5 - (lo + low_end) / 2.0
            low_total += area * lever if mode == "moment" else area
        high_start = max(lo, 0.5)
        if hi > high_start:
            area = breadth * (hi - high_start)
            lever = (high_start + hi) / 2.0 - 0.5
            high_total += area * lever if mode == "moment" else area
    return (low_total, high_total)


def visual_balance(elements: list[MapElement],
                   config: LayoutConfig = DEFAULT_LAYOUT_CONFIG) -> BalanceDetail:
    """Normalized difference of side weights about each page midline."""
    envs = [envelope(e.box) for e in elements]
    w_top, w_bottom = _side_weights(envs, 1, config.balance_weights)
    w_left, w_right = _side_weights(envs, 0, config.balance_weights)

    def ratio(w1: float, w2: float) -> float:
        total = w1 + w2
        return (w1 - w2) / total if total > 0 else 0.0

    return BalanceDetail(
        b_horizontal=ratio(w_top, w_bottom),
        b_vertical=ratio(w_left, w_right),
        w_top=w_top,
        w_bottom=w_bottom,
        w_left=w_left,
        w_right=w_right,
    )


def layout_profile(elements: list[MapElement], refined_mask=None,
                   config: LayoutConfig = DEFAULT_LAYOUT_CONFIG) -> LayoutProfile:
    """All layout indicators for one map page.

    Hierarchy and compactness prefer the refined mask (pixel-exact); when
    no mask is supplied both fall back to the main-map box. Alignment and
    balance always use every element.
    """
    main = [e for e in elements if e.kind is ElementKind.MAIN_MAP]
    if len(main) != 1:
        raise ValueError(f"expected exactly one main map, got {len(main)}")
    if refined_mask is not None:
        m = as_mask(refined_mask)
        centroid = mask_centroid(m)
        height, width = m.shape
        r_map = compactness(mask_area(m), width * height)
    else:
        box = main[0].box
        centroid = obb_centroid(box)
        r_map = compactness(obb_area(box), 1.0)
    return LayoutProfile(
        d_hier=hierarchy_deviation(centroid),
        r_map=r_map,
        alignment=alignment(elements, config),
        balance=visual_balance(elements, config),
    )
