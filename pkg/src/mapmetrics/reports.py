"""Report emission: JSON-Lines and CSV writers with deterministic bytes.

Floating values are serialized with 6 significant digits, column orders
are fixed, and files are written atomically (temp file + rename), so a
re-run on identical input yields byte-identical reports and a crashed run
never leaves a truncated file behind.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .color import ColorProfile, HueCategory, HueHistogram
from .geometry import ElementKind
from .itemsets import FrequentItemset
from .layout import AlignmentDetail, BalanceDetail, LayoutProfile
from .manifest import Diagnostic
from .pipeline import GROUP_FIELDS, INDICATORS, Failure, GroupSummary, MapMetrics
from .stats import CorrelationResult, TestResult


def canon_float(v: float) -> float:
    """Fold a float to 6 significant digits (and normalize -0.0)."""
    if v == 0.0:
        return 0.0
    return float(f"{v:.6g}")


def fmt_float(v: float | None) -> str:
    if v is None:
        return ""
    if v == 0.0:
        return "0"
    return f"{v:.6g}"


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def atomic_write_text(path, text: str):
    """Write via a sibling temp file and rename into place."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- metrics

def metrics_to_dict(m: MapMetrics) -> dict:
    color = None
    if m.color is not None:
        color = {
            "h_main": m.color.h_main.value,
            "s_ave": canon_float(m.color.s_ave),
            "b_ave": canon_float(m.color.b_ave),
            "b_con": canon_float(m.color.b_con),
            "n_hue": m.color.n_hue,
            "e_hue": canon_float(m.color.e_hue),
            "histogram": {
                "pixel_count": m.color.histogram.pixel_count,
                "counts": {cat.value: c for cat, c in
                           zip(HueCategory, m.color.histogram.counts)},
            },
        }
    a = m.layout.alignment
    b = m.layout.balance
    return {
        "map_id": m.map_id,
        "language": m.language,
        "journal": m.journal,
        "year": m.year,
        "element_count": m.element_count,
        "element_presence": {kind.value: (kind in m.present_kinds)
                             for kind in ElementKind},
        "color": color,
        "layout": {
            "d_hier": canon_float(m.layout.d_hier),
            "r_map": canon_float(m.layout.r_map),
            "alignment": {
                "r_horizontal": canon_float(a.r_horizontal),
                "r_vertical": canon_float(a.r_vertical),
                "misaligned_h": a.misaligned_h,
                "total_h": a.total_h,
                "misaligned_v": a.misaligned_v,
                "total_v": a.total_v,
            },
            "balance": {
                "b_horizontal": canon_float(b.b_horizontal),
                "b_vertical": canon_float(b.b_vertical),
                "w_top": canon_float(b.w_top),
                "w_bottom": canon_float(b.w_bottom),
                "w_left": canon_float(b.w_left),
                "w_right": canon_float(b.w_right),
            },
        },
        "mask_used": m.mask_used,
        "flags": list(m.flags),
    }


def metrics_from_dict(obj: dict) -> MapMetrics:
    """Inverse of metrics_to_dict (values carry the 6-digit rounding)."""
    color = None
    if obj["color"] is not None:
        c = obj["color"]
        histogram = HueHistogram(
            counts=tuple(c["histogram"]["counts"][cat.value]
                         for cat in HueCategory),
            pixel_count=c["histogram"]["pixel_count"],
        )
        color = ColorProfile(
            h_main=HueCategory(c["h_main"]),
            s_ave=c["s_ave"], b_ave=c["b_ave"], b_con=c["b_con"],
            n_hue=c["n_hue"], e_hue=c["e_hue"], histogram=histogram,
        )
    lay = obj["layout"]
    layout = LayoutProfile(
        d_hier=lay["d_hier"],
        r_map=lay["r_map"],
        alignment=AlignmentDetail(**lay["alignment"]),
        balance=BalanceDetail(**lay["balance"]),
    )
    return MapMetrics(
        map_id=obj["map_id"],
        language=obj["language"],
        journal=obj["journal"],
        year=obj["year"],
        element_count=obj["element_count"],
        present_kinds=frozenset(kind for kind in ElementKind
                                if obj["element_presence"][kind.value]),
        color=color,
        layout=layout,
        mask_used=obj["mask_used"],
        flags=tuple(obj["flags"]),
    )


def metrics_to_jsonl(metrics: list[MapMetrics]) -> str:
    return "".join(_dumps(metrics_to_dict(m)) + "\n" for m in metrics)


def load_metrics_jsonl(path) -> list[MapMetrics]:
    metrics = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                metrics.append(metrics_from_dict(json.loads(line)))
    return metrics


def failures_to_jsonl(failures: list[Failure]) -> str:
    return "".join(
        _dumps({"map_id": f.map_id, "stage": f.stage, "reason": f.reason}) + "\n"
        for f in failures)


def diagnostics_to_jsonl(diagnostics: list[Diagnostic]) -> str:
    return "".join(
        _dumps({"line": d.line, "map_id": d.map_id,
                "severity": d.severity, "message": d.message}) + "\n"
        for d in diagnostics)


# --------------------------------------------------------------- aggregate

_STAT_FIELDS = ("mean", "median", "q1", "q3", "n")


def _group_columns(group_by: tuple[str, ...]) -> list[str]:
    return [f for f in GROUP_FIELDS if f in group_by]


def _group_cell(summary: GroupSummary, field: str) -> str:
    value = getattr(summary, field)
    return "" if value is None else str(value)


def aggregate_to_csv(summaries: list[GroupSummary], group_by: tuple[str, ...],
                     tidy: bool = False) -> str:
    """Wide: one row per group, five columns per indicator. Tidy: one row
    per (group, indicator) for direct consumption by plotting tools."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    keys = _group_columns(group_by)
    if tidy:
        writer.writerow(keys + ["count", "color_failures", "articles",
                                "maps_per_article", "indicator"] + list(_STAT_FIELDS))
        for s in summaries:
            prefix = [_group_cell(s, k) for k in keys] + [
                str(s.count), str(s.color_failures),
                "" if s.articles is None else str(s.articles),
                fmt_float(s.maps_per_article),
            ]
            for name in INDICATORS:
                st = s.stats.get(name)
                if st is None:
                    continue
                writer.writerow(prefix + [name, fmt_float(st.mean),
                                          fmt_float(st.median), fmt_float(st.q1),
                                          fmt_float(st.q3), str(st.n)])
        return out.getvalue()

    header = keys + ["count", "color_failures", "articles", "maps_per_article"]
    for name in INDICATORS:
        header.extend(f"{name}_{f}" for f in _STAT_FIELDS)
    writer.writerow(header)
    for s in summaries:
        row = [_group_cell(s, k) for k in keys] + [
            str(s.count), str(s.color_failures),
            "" if s.articles is None else str(s.articles),
            fmt_float(s.maps_per_article),
        ]
        for name in INDICATORS:
            st = s.stats.get(name)
            if st is None:
                row.extend([""] * len(_STAT_FIELDS))
            else:
                row.extend([fmt_float(st.mean), fmt_float(st.median),
                            fmt_float(st.q1), fmt_float(st.q3), str(st.n)])
        writer.writerow(row)
    return out.getvalue()


# ----------------------------------------------------------- tests/trends

def significance_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "ns"


def compare_to_csv(rows: list[tuple[str, str, TestResult | None]]) -> str:
    """Rows of (indicator, status, result); result is None unless the test ran."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["indicator", "status", "n_zh", "n_en", "u_statistic",
                     "p_value", "method", "significance"])
    for indicator, status, result in rows:
        if result is None:
            writer.writerow([indicator, status, "", "", "", "", "", ""])
        else:
            writer.writerow([
                indicator, status, str(result.n1), str(result.n2),
                fmt_float(result.u_statistic), fmt_float(result.p_value),
                result.method, significance_stars(result.p_value),
            ])
    return out.getvalue()


def trend_to_csv(rows: list[tuple[str, str, str, str, CorrelationResult | None]]) -> str:
    """Rows of (language, indicator, unit, status, result)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["language", "indicator", "unit", "status", "n", "rho",
                     "p_value", "method", "significance"])
    for language, indicator, unit, status, result in rows:
        if result is None:
            writer.writerow([language, indicator, unit, status, "", "", "", "", ""])
        else:
            writer.writerow([
                language, indicator, unit, status, str(result.n),
                fmt_float(result.rho), fmt_float(result.p_value),
                result.method, significance_stars(result.p_value),
            ])
    return out.getvalue()


# ---------------------------------------------------------------- cooccur

def cooccur_to_csv(sections: list[tuple[str, list[FrequentItemset], dict | None]],
                   rate_label: str | None = None) -> str:
    """Sections of (group label, itemsets, optional rates per itemset)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["group", "size", "items", "support_count", "support"]
    if rate_label is not None:
        header.append(f"rate_given_{rate_label}")
    writer.writerow(header)
    for label, itemsets, rates in sections:
        for itemset in itemsets:
            items = "+".join(k.value for k in itemset.sorted_items())
            row = [label, str(len(itemset.items)), items,
                   str(itemset.support_count), fmt_float(itemset.support)]
            if rate_label is not None:
                rate = rates.get(itemset.items) if rates else None
                row.append(fmt_float(rate))
            writer.writerow(row)
    return out.getvalue()


# ------------------------------------------------------------- run summary

def run_summary_json(command: str, version: str, config: dict, counts: dict,
                     diagnostics: list[Diagnostic], failures: list[Failure],
                     outputs: list[str]) -> str:
    """Machine-readable run provenance. Deliberately carries no timestamps
    so that identical runs emit identical bytes."""
    payload = {
        "command": command,
        "version": version,
        "config": config,
        "counts": counts,
        "diagnostics": [
            {"line": d.line, "map_id": d.map_id, "severity": d.severity,
             "message": d.message} for d in diagnostics],
        "failures": [
            {"map_id": f.map_id, "stage": f.stage, "reason": f.reason}
            for f in failures],
        "outputs": outputs,
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
