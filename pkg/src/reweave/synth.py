"""Synthetic corpus generator: sample instances from hand-written templates,
emitting both the corpus and its gold alignment.

Template file: a JSON array of templates, each
    {"elements": [{"ph": "attr", "values": {"value": "surface text", ...}}
                  | {"lit": "literal text"}, ...]}
Sampling is seeded and reproducible; the gold file uses the aligned-corpus
JSONL format, so it feeds the same readers and scorers.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from .align import AlignedInstance, AlignedSegment, write_aligned
from .corpus import Corpus, Feature, FeatureCollection, Instance, save_corpus, tokenize
from .errors import DataError, NoInputError, UsageError


def load_templates(path) -> list[list[dict]]:
    path = Path(path)
    if not path.exists():
        raise NoInputError(f"template file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON: {exc}") from None
    if not isinstance(raw, list) or not raw:
        raise DataError(f"{path}: expected a non-empty array of templates")
    templates = []
    for i, tpl in enumerate(raw):
        if not isinstance(tpl, dict) or not isinstance(tpl.get("elements"), list) or not tpl["elements"]:
            raise DataError(f"{path}: template {i} needs a non-empty 'elements' array")
        elements = []
        for j, el in enumerate(tpl["elements"]):
            where = f"{path}: template {i} element {j}"
            if not isinstance(el, dict):
                raise DataError(f"{where}: expected an object")
            if "ph" in el:
                attr = el["ph"]
                values = el.get("values")
                if not isinstance(attr, str) or not attr:
                    raise DataError(f"{where}: 'ph' must name an attribute")
                if not isinstance(values, dict) or not values:
                    raise DataError(f"{where}: placeholder has an empty value pool")
                pool = sorted(values.items())
                if not all(isinstance(v, str) and v.strip() for _, v in values.items()):
                    raise DataError(f"{where}: every value needs a non-empty surface")
                elements.append({"kind": "ph", "attr": attr, "pool": pool})
            elif "lit" in el:
                lit = el.get("lit")
                if not isinstance(lit, str) or not lit.strip():
                    raise DataError(f"{where}: 'lit' must be a non-empty string")
                elements.append({"kind": "lit", "text": lit})
            else:
                raise DataError(f"{where}: element must carry 'ph' or 'lit'")
        templates.append(elements)
    return templates


def synthesize(templates, n: int, seed: int):
    """Sample n instances; returns (corpus, gold AlignedInstances)."""
    if n < 1:
        raise UsageError(f"instance count must be >= 1, got {n}")
    rng = random.Random(seed)
    width = max(4, len(str(n)))
    instances = []
    gold = []
    for k in range(n):
        template = templates[rng.randrange(len(templates))]
        parts = []
        spans = []  # (start, end, features or None), token space
        pos = 0
        for el in template:
            if el["kind"] == "ph":
                value, surf = el["pool"][rng.randrange(len(el["pool"]))]
                toks = tokenize(surf)
                spans.append((pos, pos + len(toks), Feature(el["attr"], value)))
                parts.append(surf)
                pos += len(toks)
            else:
                toks = tokenize(el["text"])
                spans.append((pos, pos + len(toks), None))
                parts.append(el["text"])
                pos += len(toks)
        text = " ".join(parts)
        cc = FeatureCollection([f for _, _, f in spans if f is not None])
        inst = Instance(f"s{k:0{width}d}", tuple(tokenize(text)), cc, text)
        instances.append(inst)
        gold.append(
            AlignedInstance(
                inst,
                [
                    AlignedSegment(s, e, FeatureCollection([f] if f else []))
                    for s, e, f in spans
                ],
            )
        )
    return Corpus(instances), gold


def gold_path_for(out_path) -> Path:
    out = Path(out_path)
    return out.with_name(out.stem + ".gold.jsonl" if out.suffix else out.name + ".gold.jsonl")


def run_synth(templates_path, n: int, seed: int, out_path) -> dict:
    templates = load_templates(templates_path)
    corpus, gold = synthesize(templates, n, seed)
    save_corpus(corpus, out_path)
    gold_path = gold_path_for(out_path)
    write_aligned(gold, gold_path)
    return {"instances": len(corpus), "out_path": str(out_path), "gold_path": str(gold_path)}
