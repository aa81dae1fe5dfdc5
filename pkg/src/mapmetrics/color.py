"""Color indicators over the main-map pixels of an image.

Works in HSV (hue in degrees [0,360), saturation and value in [0,1]) and
classifies every pixel into one of ten categories: three neutral (black,
gray, white) and seven chromatic hue bins. The thresholds and bin edges
are configuration, not constants; the defaults below make anti-aliased
grays and paper-white backgrounds land in the neutral categories.

Mean saturation/brightness and the brightness contrast accumulate through
``math.fsum``, so results are independent of pixel order and of any
chunking of the computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, EmptyMaskError
from .masks import as_mask


class HueCategory(Enum):
    """Ten pixel-color categories; declaration order is the dominance
    tie-break order."""

    BLACK = "black"
    GRAY = "gray"
    WHITE = "white"
    RED = "red"
    ORANGE = "orange"
    YELLOW = "yellow"
    GREEN = "green"
    CYAN = "cyan"
    BLUE = "blue"
    PURPLE = "purple"


_CATEGORIES = tuple(HueCategory)

# chromatic bin upper bounds in degrees; below the first edge and at/above
# the last edge is red (the red bin wraps around 0)
_DEFAULT_EDGES = (15.0, 45.0, 70.0, 165.0, 200.0, 255.0, 345.0)
_EDGE_CATEGORY = (
    HueCategory.RED,
    HueCategory.ORANGE,
    HueCategory.YELLOW,
    HueCategory.GREEN,
    HueCategory.CYAN,
    HueCategory.BLUE,
    HueCategory.PURPLE,
    HueCategory.RED,
)


@dataclass(frozen=True)
class ColorConfig:
    """Knobs for pixel classification and palette complexity.

    black_v: value below which a pixel is black regardless of saturation.
    gray_s: saturation below which a non-black pixel is neutral.
    white_v: value at or above which a neutral pixel is white, else gray.
    hue_edges: ascending chromatic bin boundaries in (0, 360).
    min_share: category share needed to count toward palette complexity.
    erosion_radius: optional mask erosion (pixels) before reading colors.
    """

    black_v: float = 0.15
    gray_s: float = 0.10
    white_v: float = 0.85
    hue_edges: tuple[float, ...] = _DEFAULT_EDGES
    min_share: float = 0.05
    erosion_radius: int = 0

    def __post_init__(self):
        if not (0.0 <= self.black_v <= 1.0 and 0.0 <= self.gray_s <= 1.0
                and 0.0 <= self.white_v <= 1.0):
            raise ValueError("achromatic thresholds must lie in [0, 1]")
        if not 0.0 < self.min_share <= 1.0:
            raise ValueError("min_share must lie in (0, 1]")
        edges = tuple(float(e) for e in self.hue_edges)
        if len(edges) != 7 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("hue_edges must be 7 strictly ascending boundaries")
        if edges[0] <= 0.0 or edges[-1] >= 360.0:
            raise ValueError("hue_edges must lie strictly inside (0, 360)")
        if self.erosion_radius < 0:
            raise ValueError("erosion_radius must be >= 0")
        object.__setattr__(self, "hue_edges", edges)


DEFAULT_COLOR_CONFIG = ColorConfig()


@dataclass(frozen=True)
class HueHistogram:
    """Per-category pixel counts over a mask; proportions derive from them
    so merging partial histograms stays exact."""

    counts: tuple[int, ...]
    pixel_count: int

    @property
    def proportions(self) -> tuple[float, ...]:
        if self.pixel_count == 0:
            return (0.0,) * len(self.counts)
        return tuple(c / self.pixel_count for c in self.counts)

    def proportion_of(self, category: HueCategory) -> float:
        return self.proportions[_CATEGORIES.index(category)]

    def as_dict(self) -> dict[str, float]:
        props = self.proportions
        return {cat.value: props[i] for i, cat in enumerate(_CATEGORIES)}


@dataclass(frozen=True)
class ColorProfile:
    """The six color indicators plus the underlying hue histogram."""

    h_main: HueCategory
    s_ave: float
    b_ave: float
    b_con: float
    n_hue: int
    e_hue: float
    histogram: HueHistogram


def rgb_to_hsv(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Hexcone HSV of one 8-bit RGB pixel: hue in degrees [0,360),
    saturation and value in [0,1]. Hue is 0 when saturation is 0."""
    rf, gf, bf = r / 255.0, g / 255.0, b / 255.0
    maxc = max(rf, gf, bf)
    minc = min(rf, gf, bf)
    v = maxc
    if maxc == minc:
        return (0.0, 0.0, v)
    rangec = maxc - minc
    s = rangec / maxc
    rc = (maxc - rf) / rangec
    gc = (maxc - gf) / rangec
    bc = (maxc - bf) / rangec
    if rf == maxc:
        h = bc - gc
    elif gf == maxc:
        h = 2.0 + rc - bc
    else:
        h = 4.0 + gc - rc
    h = (h / 6.0) % 1.0
    return (h * 360.0, s, v)


def _hsv_arrays(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized twin of rgb_to_hsv over an (N, 3) uint8 array.

    Performs the same float64 operations in the same order, so results are
    bit-identical to the scalar path.
    """
    scaled = rgb.astype(np.float64) / 255.0
    r, g, b = scaled[:, 0], scaled[:, 1], scaled[:, 2]
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    v = maxc
    rangec = maxc - minc
    achromatic = rangec == 0.0
    safe_range = np.where(achromatic, 1.0, rangec)
    safe_max = np.where(maxc == 0.0, 1.0, maxc)
    s = np.where(achromatic, 0.0, rangec / safe_max)
    rc = (maxc - r) / safe_range
    gc = (maxc - g) / safe_range
    bc = (maxc - b) / safe_range
    h = np.where(r == maxc, bc - gc,
                 np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc))
    h = np.mod(h / 6.0, 1.0)
    h = np.where(achromatic, 0.0, h * 360.0)
    return (h, s, v)


def classify_hue(h: float, s: float, v: float,
                 config: ColorConfig = DEFAULT_COLOR_CONFIG) -> HueCategory:
    """Map one HSV pixel to its category. Neutral checks come first:
    dark pixels are black, desaturated pixels are white or gray; everything
    else falls into a chromatic bin by hue."""
    if v < config.black_v:
        return HueCategory.BLACK
    if s < config.gray_s:
        return HueCategory.WHITE if v >= config.white_v else HueCategory.GRAY
    return _EDGE_CATEGORY[int(np.digitize(h, config.hue_edges))]


def _classify_arrays(h: np.ndarray, s: np.ndarray, v: np.ndarray,
                     config: ColorConfig) -> np.ndarray:
    """Vectorized twin of classify_hue; returns category indices."""
    chrom_idx = np.array([_CATEGORIES.index(c) for c in _EDGE_CATEGORY],
                         dtype=np.int64)
    out = chrom_idx[np.digitize(h, config.hue_edges)]
    neutral = s < config.gray_s
    out = np.where(neutral & (v >= config.white_v),
                   _CATEGORIES.index(HueCategory.WHITE), out)
    out = np.where(neutral & (v < config.white_v),
                   _CATEGORIES.index(HueCategory.GRAY), out)
    out = np.where(v < config.black_v, _CATEGORIES.index(HueCategory.BLACK), out)
    return out


def _masked_pixels(image, mask) -> np.ndarray:
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must be (H, W, 3), got shape {img.shape}")
    m = as_mask(mask)
    if img.shape[:2] != m.shape:
        raise DimensionMismatchError(
            f"image is {img.shape[1]}x{img.shape[0]} but mask is "
            f"{m.shape[1]}x{m.shape[0]}"
        )
    pixels = img[m]
    if pixels.shape[0] == 0:
        raise EmptyMaskError("mask selects no pixels")
    return pixels


def hue_histogram(image, mask,
                  config: ColorConfig = DEFAULT_COLOR_CONFIG) -> HueHistogram:
    """Category histogram over the mask pixels of an RGB raster."""
    pixels = _masked_pixels(image, mask)
    h, s, v = _hsv_arrays(pixels)
    cats = _classify_arrays(h, s, v, config)
    counts = np.bincount(cats, minlength=len(_CATEGORIES))
    return HueHistogram(counts=tuple(int(c) for c in counts),
                        pixel_count=int(pixels.shape[0]))


def hue_complexity(histogram: HueHistogram,
                   min_share: float = 0.05) -> tuple[int, float]:
    """Palette complexity from a histogram: the number of categories whose
    share reaches ``min_share``, and the base-2 entropy of those categories'
    shares renormalized to sum to 1.

    The entropy is clamped into [0, log2(n)] after summation; the bound
    holds mathematically and the clamp only strips float overshoot, keeping
    ``e_hue <= log2(n_hue)`` an exact invariant.
    """
    n_total = histogram.pixel_count
    if n_total == 0:
        return (0, 0.0)
    surviving = [c for c in histogram.counts if c > 0 and c / n_total >= min_share]
    n_hue = len(surviving)
    if n_hue <= 1:
        return (n_hue, 0.0)
    kept = sum(surviving)
    entropy = -math.fsum((c / kept) * math.log2(c / kept) for c in surviving)
    return (n_hue, max(0.0, min(entropy, math.log2(n_hue))))


def color_profile(image, mask,
                  config: ColorConfig = DEFAULT_COLOR_CONFIG) -> ColorProfile:
    """All six color indicators over the mask pixels of an RGB raster.

    Dominance ties resolve to the first category in declaration order.
    b_con is the population standard deviation of pixel values, so it is
    bounded by 0.5.
    """
    pixels = _masked_pixels(image, mask)
    h, s, v = _hsv_arrays(pixels)
    cats = _classify_arrays(h, s, v, config)
    counts = np.bincount(cats, minlength=len(_CATEGORIES))
    n = int(pixels.shape[0])
    histogram = HueHistogram(counts=tuple(int(c) for c in counts), pixel_count=n)

    s_ave = math.fsum(s.tolist()) / n
    b_ave = math.fsum(v.tolist()) / n
    b_con = math.sqrt(math.fsum(((vi - b_ave) ** 2 for vi in v.tolist())) / n)
    n_hue, e_hue = hue_complexity(histogram, config.min_share)

    return ColorProfile(
        h_main=_CATEGORIES[int(np.argmax(counts))],
        s_ave=s_ave,
        b_ave=b_ave,
        b_con=b_con,
        n_hue=n_hue,
        e_hue=e_hue,
        histogram=histogram,
    )
