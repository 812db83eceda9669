"""On-disk model directory: plain JSON, hand-editable, re-loadable bit-exact.

Layout:
    schemas.json     array of {"elements": [{"ph": [attr, ...]} | {"lit": "..."}],
                     "ccs": [["attr=value", ...], ...]} - one entry per distinct
                     schema with the feature collections of its training records
    fragments.json   {"<schemaIndex>:<position>": [{"text": "...", "cc": [...]}]}
    selectors.json   derived: feature index, candidate lists, mapping vectors
    aligned.jsonl    the aligned training corpus (inspection / re-extraction)
    meta.json        format version, config, corpus digest, model digest

Hand edits to schemas.json / fragments.json are legal input: `validate`
checks the invariants and retrains the selectors from the edited files. The
model digest in meta.json covers exactly those two files, so stale selectors
are detected at load time.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .align import write_aligned
from .corpus import Feature, FeatureCollection
from .errors import NoInputError, ValidationFailure
from .generate import GenerationModel
from .schema import Placeholder, Schema, SchemaDataset, schema_placeholders
from .selector import FeatureIndex, Selector, train_selector

FORMAT_VERSION = 1


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _read_json(path: Path):
    if not path.exists():
        raise NoInputError(f"missing model file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"{path}: malformed JSON: {exc}") from None


def schema_to_json(schema: Schema) -> list[dict]:
    return [
        {"ph": list(el.attributes)} if isinstance(el, Placeholder) else {"lit": el}
        for el in schema
    ]


def schema_from_json(elements, where: str = "schemas.json") -> Schema:
    if not isinstance(elements, list) or not elements:
        raise ValidationFailure(f"{where}: schema elements must be a non-empty array")
    out = []
    for el in elements:
        if not isinstance(el, dict) or len(el) != 1:
            raise ValidationFailure(f"{where}: element must be {{'ph': ...}} or {{'lit': ...}}")
        if "ph" in el:
            attrs = el["ph"]
            if (
                not isinstance(attrs, list)
                or not attrs
                or not all(isinstance(a, str) and a for a in attrs)
            ):
                raise ValidationFailure(f"{where}: 'ph' needs a non-empty list of attribute names")
            out.append(Placeholder(tuple(attrs)))
        elif "lit" in el:
            lit = el["lit"]
            if not isinstance(lit, str) or not lit:
                raise ValidationFailure(f"{where}: 'lit' needs a non-empty string")
            out.append(lit)
        else:
            raise ValidationFailure(f"{where}: element must be {{'ph': ...}} or {{'lit': ...}}")
    return tuple(out)


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def compute_model_digest(model_dir) -> str:
    """Digest over the hand-editable files (schemas.json + fragments.json)."""
    model_dir = Path(model_dir)
    h = hashlib.sha256()
    for name in ("schemas.json", "fragments.json"):
        p = model_dir / name
        if not p.exists():
            raise NoInputError(f"missing model file: {p}")
        h.update(name.encode())
        h.update(b"\x00")
        h.update(p.read_bytes())
    return h.hexdigest()


def _key_str(idx: int, pos: int) -> str:
    return f"{idx}:{pos}"


def _parse_key(key: str):
    try:
        idx, pos = key.split(":")
        return int(idx), int(pos)
    except ValueError:
        raise ValidationFailure(f"fragments.json: bad placeholder key {key!r}") from None


def write_model(model_dir, *, aligned, schema_dataset: SchemaDataset, fragment_datasets,
                config, corpus_digest: str) -> dict:
    """Write all model files; selectors are produced by the same retraining
    path `validate` uses, so train and validate agree byte for byte."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)

    schema_entries = []
    for idx, schema in enumerate(schema_dataset.schemas):
        schema_entries.append(
            {
                "elements": schema_to_json(schema),
                "ccs": [cc.sorted_keys() for cc in schema_dataset.ccs_for(idx)],
            }
        )
    _dump_json(model_dir / "schemas.json", schema_entries)

    frag_obj = {
        _key_str(idx, pos): [
            {"text": text, "cc": cc.sorted_keys()} for text, cc in records
        ]
        for (idx, pos), records in sorted(fragment_datasets.items())
    }
    _dump_json(model_dir / "fragments.json", frag_obj)

    write_aligned(aligned, model_dir / "aligned.jsonl")

    meta = {
        "format_version": FORMAT_VERSION,
        "config": {
            "sigma": config.sigma,
            "neighbourhood": config.neighbourhood,
            "max_len": config.max_len,
        },
        "corpus_digest": corpus_digest,
        "model_digest": "",  # filled by retrain below
    }
    _dump_json(model_dir / "meta.json", meta)
    return retrain_selectors(model_dir)


def _load_editable(model_dir: Path):
    """Read and structurally validate schemas.json + fragments.json."""
    raw_schemas = _read_json(model_dir / "schemas.json")
    if not isinstance(raw_schemas, list) or not raw_schemas:
        raise ValidationFailure("schemas.json must be a non-empty array")
    schemas = []
    schema_ccs = []
    for i, entry in enumerate(raw_schemas):
        where = f"schemas.json[{i}]"
        if not isinstance(entry, dict) or "elements" not in entry:
            raise ValidationFailure(f"{where}: expected an object with 'elements'")
        schema = schema_from_json(entry["elements"], where)
        ccs_raw = entry.get("ccs")
        if not isinstance(ccs_raw, list) or not ccs_raw:
            raise ValidationFailure(f"{where}: needs at least one training 'ccs' entry")
        ccs = []
        for j, keys in enumerate(ccs_raw):
            if not isinstance(keys, list):
                raise ValidationFailure(f"{where}.ccs[{j}]: expected an array of attr=value keys")
            ccs.append(FeatureCollection([Feature.parse(k) for k in keys]))
        schemas.append(schema)
        schema_ccs.append(ccs)

    raw_frags = _read_json(model_dir / "fragments.json")
    if not isinstance(raw_frags, dict):
        raise ValidationFailure("fragments.json must be an object keyed by 'schema:position'")
    fragment_datasets = {}
    for key, records in raw_frags.items():
        idx, pos = _parse_key(key)
        if not (0 <= idx < len(schemas)):
            raise ValidationFailure(f"fragments.json: key {key!r} names unknown schema {idx}")
        placeholders = schema_placeholders(schemas[idx])
        if not (0 <= pos < len(placeholders)):
            raise ValidationFailure(f"fragments.json: key {key!r} names unknown placeholder {pos}")
        if not isinstance(records, list) or not records:
            raise ValidationFailure(f"fragments.json[{key!r}]: placeholder dataset is empty")
        parsed = []
        for j, rec in enumerate(records):
            if not isinstance(rec, dict) or not rec.get("text") or "cc" not in rec:
                raise ValidationFailure(f"fragments.json[{key!r}][{j}]: needs 'text' and 'cc'")
            cc = FeatureCollection([Feature.parse(k) for k in rec["cc"]])
            if cc.attributes() != placeholders[pos].attributes:
                raise ValidationFailure(
                    f"fragments.json[{key!r}][{j}]: record attributes {cc.attributes()} "
                    f"do not match placeholder {placeholders[pos]}"
                )
            parsed.append((rec["text"], cc))
        fragment_datasets[(idx, pos)] = parsed

    for idx, schema in enumerate(schemas):
        for pos in range(len(schema_placeholders(schema))):
            if (idx, pos) not in fragment_datasets:
                raise ValidationFailure(
                    f"fragments.json: no dataset for schema {idx} placeholder {pos} "
                    f"(key {_key_str(idx, pos)!r})"
                )
    return schemas, schema_ccs, fragment_datasets


def _build_feature_index(schema_ccs, fragment_datasets) -> FeatureIndex:
    keys = []
    for ccs in schema_ccs:
        for cc in ccs:
            keys.extend(cc.sorted_keys())
    for (_, _), records in sorted(fragment_datasets.items()):
        for _, cc in records:
            keys.extend(cc.sorted_keys())
    return FeatureIndex(keys)


def retrain_selectors(model_dir) -> dict:
    """(Re)train all selectors from the current schemas/fragments files and
    rewrite selectors.json + the model digest in meta.json."""
    model_dir = Path(model_dir)
    schemas, schema_ccs, fragment_datasets = _load_editable(model_dir)
    index = _build_feature_index(schema_ccs, fragment_datasets)

    schema_records = []
    for idx, ccs in enumerate(schema_ccs):
        for cc in ccs:
            schema_records.append((idx, cc))
    schema_selector = train_selector(schema_records, index)

    frag_payload = {}
    for (idx, pos), records in sorted(fragment_datasets.items()):
        items_records = [((text, cc), cc) for text, cc in records]
        sel = train_selector(items_records, index)
        frag_payload[_key_str(idx, pos)] = {
            "items": [{"text": text, "cc": cc.sorted_keys()} for text, cc in sel.items],
            "vectors": [list(map(float, row)) for row in sel.vectors],
        }

    _dump_json(
        model_dir / "selectors.json",
        {
            "feature_index": index.keys,
            "schema_selector": {
                "items": [int(i) for i in schema_selector.items],
                "vectors": [list(map(float, row)) for row in schema_selector.vectors],
            },
            "fragment_selectors": frag_payload,
        },
    )

    meta_path = model_dir / "meta.json"
    meta = _read_json(meta_path) if meta_path.exists() else {"format_version": FORMAT_VERSION}
    meta["model_digest"] = compute_model_digest(model_dir)
    _dump_json(meta_path, meta)
    return {
        "schemata": len(schemas),
        "fragment_datasets": len(fragment_datasets),
        "feature_universe": len(index),
        "model_digest": meta["model_digest"],
    }


def validate_model(model_dir) -> dict:
    """Check the hand-editable files against the model invariants, retrain
    the selectors, and stamp the fresh digest."""
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise NoInputError(f"model directory not found: {model_dir}")
    old_meta = _read_json(model_dir / "meta.json")
    edited = old_meta.get("model_digest") != compute_model_digest(model_dir)
    summary = retrain_selectors(model_dir)
    summary["edited"] = edited
    summary["retrained"] = True
    return summary


def load_model(model_dir):
    """Reconstruct the generation model; refuses stale selectors."""
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise NoInputError(f"model directory not found: {model_dir}")
    meta = _read_json(model_dir / "meta.json")
    if meta.get("format_version") != FORMAT_VERSION:
        raise ValidationFailure(
            f"unsupported model format {meta.get('format_version')!r} (expected {FORMAT_VERSION})"
        )
    if meta.get("model_digest") != compute_model_digest(model_dir):
        raise ValidationFailure(
            "schemas.json/fragments.json changed since selectors were trained; run validate"
        )
    schemas, schema_ccs, fragment_datasets = _load_editable(model_dir)
    sel = _read_json(model_dir / "selectors.json")
    index = FeatureIndex(sel["feature_index"])
    schema_selector = Selector(
        index=index,
        items=[int(i) for i in sel["schema_selector"]["items"]],
        vectors=np.array(sel["schema_selector"]["vectors"], dtype=float),
    )
    slot_candidates = {}
    slot_selectors = {}
    for key, payload in sel["fragment_selectors"].items():
        idx, pos = _parse_key(key)
        cands = [(rec["text"], tuple(rec["cc"])) for rec in payload["items"]]
        slot_candidates[(idx, pos)] = cands
        slot_selectors[(idx, pos)] = Selector(
            index=index,
            items=list(range(len(cands))),
            vectors=np.array(payload["vectors"], dtype=float),
        )
    model = GenerationModel(
        index=index,
        schemas=schemas,
        schema_selector=schema_selector,
        slot_candidates=slot_candidates,
        slot_selectors=slot_selectors,
    )
    return model, meta
