"""Deterministic generator for the bundled 20-map fixture corpus.

Writes tests/data/corpus/ (images, masks, manifest.jsonl) and
tests/data/bad_manifest/ used by validation tests. With --refresh-golden
it also re-runs the CLI over the fixture corpus and snapshots the outputs
under tests/data/corpus/golden/.

Regenerate after any intentional behavior change:

    python3 tests/make_fixture_corpus.py --refresh-golden
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

import numpy as np
from PIL import Image

DATA = Path(__file__).resolve().parent / "data"
CORPUS = DATA / "corpus"
GOLDEN = CORPUS / "golden"
BAD = DATA / "bad_manifest"

# per-language palettes: background first. en maps lean more chromatic,
# zh maps stay muted (low saturation, bright), echoing the corpus this mimics
ZH_COLORS = [(235, 235, 235), (215, 218, 222), (200, 215, 235), (230, 198, 190)]
EN_COLORS = [(240, 240, 240), (120, 170, 220), (220, 150, 120), (150, 200, 150)]

WIDTH, HEIGHT = 80, 60


def _box(cx, cy, w, h, theta=0.0):
    return {"cx": cx, "cy": cy, "w": w, "h": h, "theta": theta}


def _el(kind, cx, cy, w, h, theta=0.0):
    return {"kind": kind, "box": _box(cx, cy, w, h, theta)}


def corpus_spec():
    """The 20 fixture maps: metadata, elements, mask treatment."""
    rows = [
        # map_id, lang, journal, year, elements, mask kind
        ("m01", "zh", "A", 1990,
         [_el("main_map", 0.50, 0.52, 0.80, 0.70),
          _el("legend", 0.85, 0.88, 0.20, 0.14)], "plain"),
        ("m02", "zh", "A", 1995,
         [_el("main_map", 0.48, 0.50, 0.78, 0.72),
          _el("legend", 0.14, 0.86, 0.18, 0.16),
          _el("scale_bar", 0.80, 0.92, 0.24, 0.05)], "plain"),
        ("m03", "zh", "A", 2000,
         [_el("main_map", 0.50, 0.48, 0.84, 0.76)], "specks"),
        ("m04", "zh", "C", 2000,
         [_el("main_map", 0.52, 0.55, 0.76, 0.66),
          _el("title", 0.50, 0.08, 0.60, 0.09)], None),
        ("m05", "zh", "C", 2005,
         [_el("main_map", 0.50, 0.50, 0.80, 0.70),
          _el("legend", 0.86, 0.14, 0.18, 0.18)], "hole"),
        ("m06", "zh", "C", 2010,
         [_el("main_map", 0.47, 0.52, 0.80, 0.72),
          _el("scale_bar", 0.20, 0.93, 0.26, 0.05),
          _el("north_arrow", 0.93, 0.10, 0.08, 0.12)], "plain"),
        ("m07", "zh", "G", 2010,
         [_el("main_map", 0.50, 0.50, 0.82, 0.74),
          _el("legend", 0.84, 0.84, 0.20, 0.18, 5.0),
          _el("scale_bar", 0.18, 0.94, 0.24, 0.04),
          _el("north_arrow", 0.94, 0.12, 0.07, 0.11)], "specks"),
        ("m08", "zh", "G", 2015,
         [_el("main_map", 0.53, 0.50, 0.78, 0.74),
          _el("inset_map", 0.12, 0.16, 0.18, 0.22)], None),
        ("m09", "zh", "G", 2020,
         [_el("main_map", 0.50, 0.47, 0.84, 0.72),
          _el("legend", 0.13, 0.87, 0.20, 0.18),
          _el("scale_bar", 0.82, 0.93, 0.26, 0.05)], "plain"),
        ("m10", "zh", "A", 2020,
         [_el("main_map", 0.49, 0.51, 0.82, 0.74),
          _el("legend", 0.87, 0.85, 0.18, 0.20),
          _el("chart", 0.13, 0.13, 0.20, 0.18)], "twoblob"),
        ("m11", "en", "I", 1990,
         [_el("main_map", 0.50, 0.50, 0.82, 0.72),
          _el("legend", 0.86, 0.87, 0.20, 0.16)], "plain"),
        ("m12", "en", "I", 1995,
         [_el("main_map", 0.51, 0.49, 0.80, 0.74),
          _el("legend", 0.14, 0.85, 0.18, 0.18),
          _el("scale_bar", 0.80, 0.93, 0.26, 0.05)], "plain"),
        ("m13", "en", "I", 2000,
         [_el("main_map", 0.50, 0.53, 0.78, 0.68),
          _el("descriptive_text", 0.50, 0.94, 0.70, 0.07)], None),
        ("m14", "en", "K", 2000,
         [_el("main_map", 0.48, 0.50, 0.82, 0.74),
          _el("legend", 0.86, 0.13, 0.20, 0.16),
          _el("north_arrow", 0.93, 0.88, 0.08, 0.12)], "plain"),
        ("m15", "en", "K", 2005,
         [_el("main_map", 0.50, 0.52, 0.80, 0.70),
          _el("title", 0.50, 0.07, 0.56, 0.08),
          _el("legend", 0.85, 0.86, 0.20, 0.16)], "mismatch"),
        ("m16", "en", "K", 2010,
         [_el("main_map", 0.50, 0.50, 0.80, 0.72),
          _el("scale_bar", 0.99, 0.94, 0.06, 0.05)], None),  # slack overshoot
        ("m17", "en", "P", 2010,
         [_el("main_map", 0.50, 0.49, 0.82, 0.74, -3.0),
          _el("legend", 0.14, 0.14, 0.20, 0.18),
          _el("scale_bar", 0.82, 0.94, 0.24, 0.04),
          _el("north_arrow", 0.94, 0.14, 0.07, 0.11)], "plain"),
        ("m18", "en", "P", 2015,
         [_el("main_map", 0.49, 0.50, 0.80, 0.74),
          _el("legend", 0.87, 0.86, 0.18, 0.18),
          _el("table", 0.13, 0.90, 0.20, 0.12)], "plain"),
        ("m19", "en", "P", 2020,
         [_el("main_map", 0.50, 0.52, 0.82, 0.70),
          _el("legend", 0.13, 0.86, 0.20, 0.18),
          _el("scale_bar", 0.80, 0.94, 0.26, 0.04),
          _el("inset_map", 0.14, 0.15, 0.18, 0.20)], "plain"),
        ("m20", "en", "I", 2020,
         [_el("main_map", 0.52, 0.50, 0.78, 0.72),
          _el("legend", 0.86, 0.88, 0.20, 0.14)], None),
    ]
    return rows


def _env_to_pixels(box):
    x0 = int(round((box["cx"] - box["w"] / 2) * WIDTH))
    x1 = int(round((box["cx"] + box["w"] / 2) * WIDTH))
    y0 = int(round((box["cy"] - box["h"] / 2) * HEIGHT))
    y1 = int(round((box["cy"] + box["h"] / 2) * HEIGHT))
    return max(x0, 0), max(y0, 0), min(x1, WIDTH), min(y1, HEIGHT)


def draw_image(rng, language, elements):
    palette = ZH_COLORS if language == "zh" else EN_COLORS
    img = np.empty((HEIGHT, WIDTH, 3), dtype=np.uint8)
    img[:, :] = palette[0]
    main = next(e["box"] for e in elements if e["kind"] == "main_map")
    x0, y0, x1, y1 = _env_to_pixels(main)
    # a few colored patches inside the main region
    for color in palette[1:1 + rng.integers(2, 4)]:
        px0 = rng.integers(x0, max(x0 + 1, x1 - 8))
        py0 = rng.integers(y0, max(y0 + 1, y1 - 8))
        px1 = min(x1, px0 + rng.integers(6, 20))
        py1 = min(y1, py0 + rng.integers(5, 14))
        img[py0:py1, px0:px1] = color
    # thin dark frame around the main region
    img[y0, x0:x1] = (40, 40, 40)
    img[y1 - 1, x0:x1] = (40, 40, 40)
    img[y0:y1, x0] = (40, 40, 40)
    img[y0:y1, x1 - 1] = (40, 40, 40)
    return img


def draw_mask(rng, elements, kind):
    main = next(e["box"] for e in elements if e["kind"] == "main_map")
    x0, y0, x1, y1 = _env_to_pixels(main)
    mask = np.zeros((HEIGHT, WIDTH), dtype=np.uint8)
    mask[y0:y1, x0:x1] = 255
    if kind == "hole":
        hx = (x0 + x1) // 2
        hy = (y0 + y1) // 2
        mask[hy - 3:hy + 3, hx - 5:hx + 5] = 0
    if kind in ("specks", "twoblob"):
        for _ in range(4):
            sx = int(rng.integers(0, WIDTH - 2))
            sy = int(rng.integers(0, HEIGHT - 2))
            if not mask[sy:sy + 2, sx:sx + 2].any():
                mask[sy:sy + 2, sx:sx + 2] = 255
    if kind == "twoblob":
        mask[2:12, 2:14] = 255  # 120 px secondary blob, dropped by refinement
    return mask


def write_corpus():
    images = CORPUS / "images"
    masks = CORPUS / "masks"
    images.mkdir(parents=True, exist_ok=True)
    masks.mkdir(parents=True, exist_ok=True)

    lines = []
    for map_id, language, journal, year, elements, mask_kind in corpus_spec():
        rng = np.random.default_rng(int(map_id[1:]))
        image_rel = f"images/{map_id}.png"
        if map_id == "m13":
            # deliberately corrupt: a PNG signature followed by junk
            (CORPUS / image_rel).write_bytes(b"\x89PNG\r\n\x1a\n" + b"not an image")
        else:
            img = draw_image(rng, language, elements)
            Image.fromarray(img, mode="RGB").save(CORPUS / image_rel)

        mask_rel = None
        if mask_kind == "mismatch":
            mask_rel = f"masks/{map_id}_mask.png"
            bad = np.zeros((HEIGHT // 2, WIDTH // 2), dtype=np.uint8)
            bad[5:25, 5:35] = 255
            Image.fromarray(bad, mode="L").save(CORPUS / mask_rel)
        elif mask_kind is not None:
            mask_rel = f"masks/{map_id}_mask.png"
            mask = draw_mask(rng, elements, mask_kind)
            Image.fromarray(mask, mode="L").save(CORPUS / mask_rel)

        lines.append(json.dumps({
            "map_id": map_id,
            "image_path": image_rel,
            "mask_path": mask_rel,
            "language": language,
            "journal": journal,
            "year": year,
            "elements": elements,
        }, ensure_ascii=False))

    (CORPUS / "manifest.jsonl").write_text("\n".join(lines) + "\n",
                                           encoding="utf-8")


def write_bad_manifest():
    BAD.mkdir(parents=True, exist_ok=True)
    good = {
        "map_id": "ok1", "image_path": "images/m01.png", "mask_path": None,
        "language": "zh", "journal": "A", "year": 2001,
        "elements": [_el("main_map", 0.5, 0.5, 0.8, 0.7)],
    }
    double_main = dict(good, map_id="bad_double", elements=[
        _el("main_map", 0.5, 0.5, 0.8, 0.7),
        _el("main_map", 0.3, 0.3, 0.2, 0.2)])
    unknown_kind = dict(good, map_id="bad_kind", elements=[
        _el("main_map", 0.5, 0.5, 0.8, 0.7), _el("watermark", 0.2, 0.2, 0.1, 0.1)])
    bad_year = dict(good, map_id="bad_year", year=1885)
    overshoot = dict(good, map_id="warn_overshoot", elements=[
        _el("main_map", 0.5, 0.5, 0.8, 0.7),
        _el("scale_bar", 0.99, 0.9, 0.06, 0.05)])
    beyond_slack = dict(good, map_id="bad_slack", elements=[
        _el("main_map", 0.5, 0.5, 0.8, 0.7),
        _el("legend", 0.99, 0.9, 0.3, 0.1)])
    lines = [
        json.dumps(good),
        "{this is not json",
        json.dumps(double_main),
        json.dumps(unknown_kind),
        json.dumps(bad_year),
        json.dumps(overshoot),
        json.dumps(beyond_slack),
        json.dumps(dict(good, map_id="ok1")),  # duplicate id
    ]
    (BAD / "manifest.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def refresh_golden():
    from mapmetrics.cli import main as cli_main

    GOLDEN.mkdir(parents=True, exist_ok=True)
    work = CORPUS / "_golden_build"
    if work.exists():
        shutil.rmtree(work)
    work.mkdir()
    manifest = str(CORPUS / "manifest.jsonl")
    runs = [
        (["analyze", "--manifest", manifest, "--out", str(work), "--workers", "1"],
         ["metrics.jsonl", "failures.jsonl"]),
        (["aggregate", "--manifest", manifest, "--out", str(work),
          "--workers", "1", "--group-by", "language,year"],
         ["aggregate.csv"]),
        (["cooccur", "--manifest", manifest, "--out", str(work),
          "--min-support", "0.2"],
         ["cooccur.csv"]),
    ]
    for argv, outputs in runs:
        code = cli_main(argv)
        if code != 0:
            raise SystemExit(f"golden build failed: {argv} -> exit {code}")
        for name in outputs:
            shutil.copyfile(work / name, GOLDEN / name)
    shutil.rmtree(work)
    print(f"golden files refreshed under {GOLDEN}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--refresh-golden", action="store_true")
    args = parser.parse_args(argv)
    write_corpus()
    write_bad_manifest()
    print(f"fixture corpus written under {CORPUS}")
    if args.refresh_golden:
        refresh_golden()


if __name__ == "__main__":
    sys.exit(main())
