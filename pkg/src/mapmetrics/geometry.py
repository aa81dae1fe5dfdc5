"""Domain geometry: pages, the element taxonomy, oriented boxes and their envelopes.

All coordinates are normalized to page dimensions (x and y in [0, 1]);
pixel space appears only at mask boundaries. Values are immutable after
construction and safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Detector boxes may overshoot the page by a little; anything inside this
# slack is kept (with a validation warning), anything beyond is rejected.
PAGE_SLACK = 0.05


@dataclass(frozen=True)
class PageGeometry:
    """Pixel dimensions of a map page."""

    width_px: int
    height_px: int

    def __post_init__(self):
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError(
                f"page dimensions must be >= 1, got {self.width_px}x{self.height_px}"
            )


class ElementKind(Enum):
    """The ten cartographic element types. Closed set; declaration order is
    the canonical tie-break order used elsewhere."""

    MAIN_MAP = "main_map"
    TITLE = "title"
    LEGEND = "legend"
    SCALE_BAR = "scale_bar"
    INSET_MAP = "inset_map"
    CHART = "chart"
    DESCRIPTIVE_TEXT = "descriptive_text"
    NORTH_ARROW = "north_arrow"
    PICTURE = "picture"
    TABLE = "table"

    @classmethod
    def from_label(cls, label: str) -> "ElementKind":
        """Parse a manifest label; unknown labels are rejected."""
        try:
            return cls(label)
        except ValueError:
            raise ValueError(f"unknown element kind {label!r}") from None


def normalize_theta(theta: float) -> float:
    """Fold a rotation in degrees into the canonical [-90, 90) range.

    An oriented rectangle has 180-degree symmetry, so this loses nothing.
    """
    t = math.fmod(theta + 90.0, 180.0)
    if t < 0:
        t += 180.0
    return t - 90.0


@dataclass(frozen=True)
class OrientedBox:
    """A rotated rectangle in normalized page coordinates.

    ``theta`` is the rotation in degrees, stored in [-90, 90). Corners may
    exceed the page by at most PAGE_SLACK.
    """

    cx: float
    cy: float
    w: float
    h: float
    theta: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValueError(f"box center ({self.cx}, {self.cy}) outside [0,1]^2")
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValueError(f"box extents ({self.w}, {self.h}) outside (0,1]")
        object.__setattr__(self, "theta", normalize_theta(self.theta))

    def _trig(self) -> tuple[float, float]:
        # Axis-aligned angles are handled exactly so that the envelope of an
        # unrotated (or 90-degree) box is exact, not off by a sin/cos ulp.
        if self.theta == 0.0:
            return 1.0, 0.0
        if self.theta == -90.0:
            return 0.0, -1.0
        rad = math.radians(self.theta)
        return math.cos(rad), math.sin(rad)

    def corners(self) -> list[tuple[float, float]]:
        """The four rotated corner points, counter-clockwise from (+w/2, +h/2)."""
        c, s = self._trig()
        hw, hh = self.w / 2.0, self.h / 2.0
        pts = []
        for dx, dy in ((hw, hh), (-hw, hh), (-hw, -hh), (hw, -hh)):
            pts.append((self.cx + dx * c - dy * s, self.cy + dx * s + dy * c))
        return pts

    def page_overshoot(self) -> float:
        """How far the farthest corner leaves [0,1]^2 (0.0 when fully inside).

        Ingestion rejects boxes whose overshoot exceeds PAGE_SLACK and warns
        on any positive overshoot; the box itself stays usable either way.
        """
        worst = 0.0
        for x, y in self.corners():
            worst = max(worst, -x, x - 1.0, -y, y - 1.0)
        return max(0.0, worst)


@dataclass(frozen=True)
class AxisAlignedBox:
    """Axis-aligned envelope in normalized page coordinates."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(
                f"degenerate envelope ({self.x_min}, {self.y_min}, "
                f"{self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)


@dataclass(frozen=True)
class MapElement:
    """One detected element: its kind and oriented box."""

    kind: ElementKind
    box: OrientedBox


def envelope(box: OrientedBox) -> AxisAlignedBox:
    """Tightest axis-aligned box containing all four rotated corners,
    clamped to the page."""
    c, s = box._trig()
    ex = abs(c) * box.w / 2.0 + abs(s) * box.h / 2.0
    ey = abs(s) * box.w / 2.0 + abs(c) * box.h / 2.0
    return AxisAlignedBox(
        x_min=max(0.0, box.cx - ex),
        y_min=max(0.0, box.cy - ey),
        x_max=min(1.0, box.cx + ex),
        y_max=min(1.0, box.cy + ey),
    )


def obb_centroid(box: OrientedBox) -> tuple[float, float]:
    """Centroid of the box; rotation does not move it."""
    return (box.cx, box.cy)


def obb_area(box: OrientedBox) -> float:
    """Area in normalized page units; invariant under rotation."""
    return box.w * box.h
