"""Triangle inspection: per-fragment metric values as text rows or SVG.

The SVG stays within a tiny element vocabulary (rect, text, title) so it can
be checked structurally: one rect per fragment, n(n+1)/2 in total. In weight
mode the maxima fragments are outlined and the aligned ones drawn heavier.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .align import AlignConfig, align_feature, core, express, weight, weight_maxima
from .corpus import Feature, Instance, load_corpus
from .errors import UsageError
from .stats import CooccurrenceTable

METRICS = {"express": express, "core": core, "weight": weight}
FORMATS = ("text", "svg")

_CELL_W = 84
_CELL_H = 26
_MARGIN = 10


def triangle_values(instance: Instance, g, table, metric: str) -> dict:
    fn = METRICS[metric]
    toks = instance.tokens
    n = len(toks)
    return {
        (s, s + k): fn(" ".join(toks[s:s + k]), g, table)
        for k in range(1, n + 1)
        for s in range(n - k + 1)
    }


def render_text(instance: Instance, values: dict, aligned: set, maxima: set) -> str:
    toks = instance.tokens
    n = len(toks)
    lines = []
    for k in range(n, 0, -1):
        cells = []
        for s in range(n - k + 1):
            span = (s, s + k)
            cells.append(f"{' '.join(toks[s:s + k])}:{values[span]:.3f}")
        lines.append(f"L{k} | " + "  ".join(cells))
    if maxima:
        spans = "  ".join(" ".join(toks[s:e]) for s, e in sorted(maxima))
        lines.append(f"maxima | {spans}")
    if aligned:
        spans = "  ".join(" ".join(toks[s:e]) for s, e in sorted(aligned))
        lines.append(f"aligned | {spans}")
    return "\n".join(lines) + "\n"


def _fill_color(v: float) -> str:
    v = 0.0 if v < 0 else (1.0 if v > 1 else v)
    return f"rgb(255,{255 - round(64 * v)},{255 - round(255 * v)})"


def render_svg(instance: Instance, values: dict, aligned: set, maxima: set) -> str:
    toks = instance.tokens
    n = len(toks)
    width = _MARGIN * 2 + n * _CELL_W
    height = _MARGIN * 2 + n * _CELL_H
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    # top row = whole description, bottom row = unigrams
    for k in range(n, 0, -1):
        y = _MARGIN + (n - k) * _CELL_H
        for s in range(n - k + 1):
            span = (s, s + k)
            x = _MARGIN + s * _CELL_W
            w = k * _CELL_W - 3
            if span in aligned:
                stroke, sw = "#7a1500", 3
            elif span in maxima:
                stroke, sw = "#cc2200", 2
            else:
                stroke, sw = "#b0b0b0", 0.5
            title = escape(f"{' '.join(toks[s:s + k])} = {values[span]:.6f}")
            parts.append(
                f'<rect x="{x}" y="{y}" width="{w}" height="{_CELL_H - 3}" '
                f'fill="{_fill_color(values[span])}" stroke="{stroke}" '
                f'stroke-width="{sw}"><title>{title}</title></rect>'
            )
            parts.append(
                f'<text x="{x + w / 2:.1f}" y="{y + _CELL_H / 2 + 2:.1f}" '
                f'font-size="10" text-anchor="middle">{values[span]:.3f}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run_inspect(corpus_path, instance_id: str, feature_key: str, metric: str = "weight",
                fmt: str = "text", sigma: float = 0.5) -> dict:
    if metric not in METRICS:
        raise UsageError(f"metric must be one of {sorted(METRICS)}, got {metric!r}")
    if fmt not in FORMATS:
        raise UsageError(f"format must be one of {FORMATS}, got {fmt!r}")
    try:
        g = Feature.parse(feature_key)
    except Exception:
        raise UsageError(f"not an attribute=value feature: {feature_key!r}") from None
    corpus = load_corpus(corpus_path)
    instance = corpus.get(instance_id)
    table = CooccurrenceTable.build(corpus)
    config = AlignConfig(sigma=sigma)
    values = triangle_values(instance, g, table, metric)
    aligned = {(f.start, f.end) for f in align_feature(instance, g, table, config)}
    maxima = weight_maxima(instance, g, table, config.neighbourhood) if metric == "weight" else set()
    renderer = render_svg if fmt == "svg" else render_text
    content = renderer(instance, values, aligned, maxima)
    return {"content": content, "cells": len(values), "format": fmt}
