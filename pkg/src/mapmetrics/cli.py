"""Command-line surface: validate, analyze, aggregate, compare, trend,
cooccur, version.

Exit codes: 0 success, 1 any per-record diagnostic or failure under
--strict, 2 usage errors. Every command writes a machine-readable
<command>_summary.json (config echo, counts, diagnostics, failures)
alongside its outputs; all files are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from . import __version__
from .color import ColorConfig
from .errors import (
    ConstantInputError,
    EmptyGroupError,
    InsufficientYearsError,
    InvalidThresholdError,
)
from .geometry import ElementKind
from .itemsets import apriori, conditional_rate
from .layout import BALANCE_WEIGHT_MODES, SIGHT_LINE_MODES, LayoutConfig
from .manifest import DEFAULT_YEAR_RANGE, load_manifest
from .pipeline import (
    GROUP_FIELDS,
    INDICATORS,
    AnalysisConfig,
    aggregate,
    analyze_corpus,
    cross_group_compare,
    yearly_trend,
)
from . import reports

ENV_OUT = "MAPMETRICS_OUT"
ENV_WORKERS = "MAPMETRICS_WORKERS"


class UsageError(Exception):
    pass


def _add_io_args(parser: argparse.ArgumentParser, need_manifest: bool):
    parser.add_argument("--manifest", required=need_manifest,
                        help="JSON-Lines corpus manifest")
    parser.add_argument("--out", default=None,
                        help=f"output directory (default: ${ENV_OUT} or '.')")
    parser.add_argument("--strict", action="store_true",
                        help="exit 1 on any per-record diagnostic or failure")
    parser.add_argument("--year-min", type=int, default=DEFAULT_YEAR_RANGE[0])
    parser.add_argument("--year-max", type=int, default=DEFAULT_YEAR_RANGE[1])


def _add_analysis_args(parser: argparse.ArgumentParser):
    parser.add_argument("--workers", type=int, default=None,
                        help=f"worker pool size (default: ${ENV_WORKERS} or 1)")
    parser.add_argument("--black-v", type=float, default=0.15,
                        help="value below which a pixel is black")
    parser.add_argument("--gray-s", type=float, default=0.10,
                        help="saturation below which a pixel is neutral")
    parser.add_argument("--white-v", type=float, default=0.85,
                        help="value splitting neutral pixels into white vs gray")
    parser.add_argument("--hue-edges", default="15,45,70,165,200,255,345",
                        help="7 ascending chromatic bin boundaries in degrees")
    parser.add_argument("--min-share", type=float, default=0.05,
                        help="category share counted toward palette complexity")
    parser.add_argument("--erosion", type=int, default=0,
                        help="mask erosion radius (pixels) before color reads")
    parser.add_argument("--tau", type=float, default=0.01,
                        help="alignment clustering tolerance")
    parser.add_argument("--sight-lines", choices=SIGHT_LINE_MODES,
                        default="edges-and-center")
    parser.add_argument("--balance-weights", choices=BALANCE_WEIGHT_MODES,
                        default="moment")


def _add_metrics_arg(parser: argparse.ArgumentParser):
    parser.add_argument("--metrics", default=None,
                        help="reuse a metrics.jsonl instead of re-analyzing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mapmetrics",
        description="Quantify thematic-map design over an annotated corpus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a manifest, report diagnostics")
    _add_io_args(p, need_manifest=True)

    p = sub.add_parser("analyze", help="per-map color and layout metrics")
    _add_io_args(p, need_manifest=True)
    _add_analysis_args(p)

    p = sub.add_parser("aggregate", help="group summaries over the corpus")
    _add_io_args(p, need_manifest=False)
    _add_analysis_args(p)
    _add_metrics_arg(p)
    p.add_argument("--group-by", default="",
                   help="comma subset of language,year,journal (empty = global)")
    p.add_argument("--articles", default=None,
                   help="CSV side table with group columns plus 'articles'")
    p.add_argument("--tidy", action="store_true",
                   help="long-format CSV (one row per group and indicator)")

    p = sub.add_parser("compare", help="Mann-Whitney zh-vs-en per indicator")
    _add_io_args(p, need_manifest=False)
    _add_analysis_args(p)
    _add_metrics_arg(p)
    p.add_argument("--indicator", default="all")

    p = sub.add_parser("trend", help="Spearman year trends per language")
    _add_io_args(p, need_manifest=False)
    _add_analysis_args(p)
    _add_metrics_arg(p)
    p.add_argument("--indicator", default="all")
    p.add_argument("--trend-unit", choices=("annual-mean", "map"),
                   default="annual-mean")

    p = sub.add_parser("cooccur", help="frequent element combinations")
    _add_io_args(p, need_manifest=False)
    _add_metrics_arg(p)
    p.add_argument("--min-support", type=float, default=0.2)
    p.add_argument("--rate-denominator", default=None,
                   help="comma list of element kinds; adds a conditional-rate column")

    sub.add_parser("version", help="print the tool version")
    return parser


def _resolve_out(args) -> Path:
    out = args.out or os.environ.get(ENV_OUT) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve_workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        workers = args.workers
    else:
        env = os.environ.get(ENV_WORKERS)
        try:
            workers = int(env) if env else 1
        except ValueError:
            raise UsageError(f"${ENV_WORKERS} must be an integer, got {env!r}")
    if workers < 1:
        raise UsageError("workers must be >= 1")
    return workers


def _analysis_config(args) -> AnalysisConfig:
    try:
        edges = tuple(float(e) for e in args.hue_edges.split(","))
    except ValueError:
        raise UsageError(f"--hue-edges must be comma-separated numbers, "
                         f"got {args.hue_edges!r}")
    try:
        color = ColorConfig(
            black_v=args.black_v, gray_s=args.gray_s, white_v=args.white_v,
            hue_edges=edges, min_share=args.min_share,
            erosion_radius=args.erosion,
        )
        layout = LayoutConfig(tau=args.tau, sight_lines=args.sight_lines,
                              balance_weights=args.balance_weights)
        return AnalysisConfig(color=color, layout=layout,
                              workers=_resolve_workers(args))
    except ValueError as exc:
        raise UsageError(str(exc))


def _year_range(args) -> tuple[int, int]:
    if args.year_min > args.year_max:
        raise UsageError("--year-min must not exceed --year-max")
    return (args.year_min, args.year_max)


def _config_echo(args) -> dict:
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key == "command":
            continue
        echo[key] = str(value) if isinstance(value, Path) else value
    return echo


def _obtain_metrics(args):
    """Metrics either parsed from --metrics or computed from --manifest."""
    if getattr(args, "metrics", None):
        metrics = reports.load_metrics_jsonl(args.metrics)
        return metrics, [], []
    if not args.manifest:
        raise UsageError("either --manifest or --metrics is required")
    records, diagnostics = load_manifest(args.manifest, _year_range(args))
    config = _analysis_config(args)
    metrics, failures = analyze_corpus(records, config)
    return metrics, diagnostics, failures


def _emit(out_dir: Path, name: str, text: str, outputs: list[str]):
    reports.atomic_write_text(out_dir / name, text)
    outputs.append(name)


def _finish(args, command, out_dir, counts, diagnostics, failures, outputs) -> int:
    summary = reports.run_summary_json(
        command, __version__, _config_echo(args), counts,
        diagnostics, failures, outputs)
    reports.atomic_write_text(out_dir / f"{command}_summary.json", summary)
    if args.strict and (diagnostics or failures):
        return 1
    return 0


def _cmd_validate(args) -> int:
    out_dir = _resolve_out(args)
    records, diagnostics = load_manifest(args.manifest, _year_range(args))
    outputs: list[str] = []
    _emit(out_dir, "diagnostics.jsonl",
          reports.diagnostics_to_jsonl(diagnostics), outputs)
    counts = {
        "records": len(records),
        "rejected_lines": sum(1 for d in diagnostics if d.severity == "error"),
        "warnings": sum(1 for d in diagnostics if d.severity == "warning"),
    }
    return _finish(args, "validate", out_dir, counts, diagnostics, [], outputs)


def _cmd_analyze(args) -> int:
    out_dir = _resolve_out(args)
    records, diagnostics = load_manifest(args.manifest, _year_range(args))
    config = _analysis_config(args)
    metrics, failures = analyze_corpus(records, config)
    outputs: list[str] = []
    _emit(out_dir, "metrics.jsonl", reports.metrics_to_jsonl(metrics), outputs)
    _emit(out_dir, "failures.jsonl", reports.failures_to_jsonl(failures), outputs)
    counts = {
        "records": len(records),
        "rejected_lines": sum(1 for d in diagnostics if d.severity == "error"),
        "warnings": sum(1 for d in diagnostics if d.severity == "warning"),
        "analyzed": len(metrics),
        "failures": len(failures),
    }
    return _finish(args, "analyze", out_dir, counts, diagnostics, failures, outputs)


def _parse_group_by(raw: str) -> tuple[str, ...]:
    if not raw:
        return ()
    fields = tuple(f.strip() for f in raw.split(","))
    for field in fields:
        if field not in GROUP_FIELDS:
            raise UsageError(
                f"--group-by accepts {', '.join(GROUP_FIELDS)}; got {field!r}")
    if len(set(fields)) != len(fields):
        raise UsageError("--group-by fields must be unique")
    return fields


def _load_articles(path, group_by: tuple[str, ...]) -> dict[tuple, int]:
    table: dict[tuple, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in (*group_by, "articles")
                   if c not in (reader.fieldnames or [])]
        if missing:
            raise UsageError(
                f"articles table lacks column(s): {', '.join(missing)}")
        for row in reader:
            key = tuple(int(row[f]) if f == "year" else row[f] for f in group_by)
            table[key] = int(row["articles"])
    return table


def _cmd_aggregate(args) -> int:
    out_dir = _resolve_out(args)
    group_by = _parse_group_by(args.group_by)
    metrics, diagnostics, failures = _obtain_metrics(args)
    if not metrics:
        raise UsageError("no metrics to aggregate")
    articles = _load_articles(args.articles, group_by) if args.articles else None
    summaries = aggregate(metrics, group_by, articles)
    outputs: list[str] = []
    _emit(out_dir, "aggregate.csv",
          reports.aggregate_to_csv(summaries, group_by, tidy=args.tidy), outputs)
    counts = {"metrics": len(metrics), "groups": len(summaries),
              "failures": len(failures)}
    return _finish(args, "aggregate", out_dir, counts, diagnostics, failures, outputs)


def _cmd_compare(args) -> int:
    out_dir = _resolve_out(args)
    metrics, diagnostics, failures = _obtain_metrics(args)
    names = list(INDICATORS) if args.indicator == "all" else [args.indicator]
    for name in names:
        if name not in INDICATORS:
            raise UsageError(f"unknown indicator {name!r}")
    rows = []
    for name in names:
        try:
            result = cross_group_compare(metrics, name)
        except EmptyGroupError:
            rows.append((name, "empty-group", None))
            continue
        status = "degenerate" if result.degenerate else "ok"
        rows.append((name, status, result))
    outputs: list[str] = []
    _emit(out_dir, "compare.csv", reports.compare_to_csv(rows), outputs)
    counts = {"metrics": len(metrics), "tests": len(rows)}
    return _finish(args, "compare", out_dir, counts, diagnostics, failures, outputs)


def _cmd_trend(args) -> int:
    out_dir = _resolve_out(args)
    metrics, diagnostics, failures = _obtain_metrics(args)
    names = list(INDICATORS) if args.indicator == "all" else [args.indicator]
    for name in names:
        if name not in INDICATORS:
            raise UsageError(f"unknown indicator {name!r}")
    languages = sorted({m.language for m in metrics})
    rows = []
    for language in languages:
        for name in names:
            try:
                result = yearly_trend(metrics, name, language, args.trend_unit)
                rows.append((language, name, args.trend_unit, "ok", result))
            except InsufficientYearsError:
                rows.append((language, name, args.trend_unit,
                             "insufficient-years", None))
            except ConstantInputError:
                rows.append((language, name, args.trend_unit,
                             "constant-input", None))
    outputs: list[str] = []
    _emit(out_dir, "trend.csv", reports.trend_to_csv(rows), outputs)
    counts = {"metrics": len(metrics), "tests": len(rows)}
    return _finish(args, "trend", out_dir, counts, diagnostics, failures, outputs)


def _parse_kinds(raw: str) -> frozenset[ElementKind]:
    kinds = []
    for label in raw.split(","):
        try:
            kinds.append(ElementKind.from_label(label.strip()))
        except ValueError as exc:
            raise UsageError(str(exc))
    return frozenset(kinds)


def _cmd_cooccur(args) -> int:
    out_dir = _resolve_out(args)
    diagnostics = []
    if args.metrics:
        metrics = reports.load_metrics_jsonl(args.metrics)
        transactions = [(m.language, m.present_kinds) for m in metrics]
    elif args.manifest:
        records, diagnostics = load_manifest(args.manifest, _year_range(args))
        transactions = [(r.language, r.element_kinds) for r in records]
    else:
        raise UsageError("either --manifest or --metrics is required")
    if not transactions:
        raise UsageError("no transactions to mine")

    denominator = (_parse_kinds(args.rate_denominator)
                   if args.rate_denominator else None)
    rate_label = ("+".join(sorted(k.value for k in denominator))
                  if denominator else None)

    groups = [("all", [t for _, t in transactions])]
    for language in sorted({lang for lang, _ in transactions}):
        groups.append((language,
                       [t for lang, t in transactions if lang == language]))

    sections = []
    total = 0
    try:
        for label, txns in groups:
            itemsets = apriori(txns, args.min_support)
            total += len(itemsets)
            rates = None
            if denominator is not None:
                rates = {}
                for itemset in itemsets:
                    if denominator <= itemset.items:
                        try:
                            rates[itemset.items] = conditional_rate(
                                itemsets, itemset.items, denominator)
                        except Exception:
                            pass
            sections.append((label, itemsets, rates))
    except InvalidThresholdError as exc:
        raise UsageError(str(exc))

    outputs: list[str] = []
    _emit(out_dir, "cooccur.csv",
          reports.cooccur_to_csv(sections, rate_label), outputs)
    counts = {"transactions": len(transactions), "itemsets": total}
    return _finish(args, "cooccur", out_dir, counts, diagnostics, [], outputs)


_COMMANDS = {
    "validate": _cmd_validate,
    "analyze": _cmd_analyze,
    "aggregate": _cmd_aggregate,
    "compare": _cmd_compare,
    "trend": _cmd_trend,
    "cooccur": _cmd_cooccur,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "version":
        print(f"mapmetrics {__version__}")
        return 0
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: cannot read {exc.filename}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
