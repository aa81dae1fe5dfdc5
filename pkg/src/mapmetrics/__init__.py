"""Corpus analytics for thematic-map design: color tone, color complexity,
and layout structure from map images and element annotations, with the
statistics used to compare groups and trace temporal trends."""

__version__ = "0.1.0"

from .color import ColorConfig, ColorProfile, HueCategory, HueHistogram, color_profile
from .geometry import (
    AxisAlignedBox,
    ElementKind,
    MapElement,
    OrientedBox,
    PageGeometry,
    envelope,
    obb_area,
    obb_centroid,
)
from .itemsets import FrequentItemset, apriori, conditional_rate, top_itemsets
from .layout import (
    AlignmentDetail,
    BalanceDetail,
    LayoutConfig,
    LayoutProfile,
    alignment,
    compactness,
    hierarchy_deviation,
    layout_profile,
    visual_balance,
)
from .manifest import Diagnostic, MapRecord, load_manifest
from .masks import (
    ComponentLabeling,
    label_components,
    mask_area,
    mask_centroid,
    refine_main_mask,
)
from .pipeline import (
    AnalysisConfig,
    Failure,
    GroupSummary,
    MapMetrics,
    aggregate,
    analyze_corpus,
    analyze_map,
    cross_group_compare,
    yearly_trend,
)
from .stats import (
    CorrelationResult,
    TestResult,
    mann_whitney_u,
    rank_with_ties,
    spearman,
)
