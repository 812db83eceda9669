"""Corpus model: features, instances, tokenization, JSONL load/save.

A corpus instance pairs a tokenized textual description with the collection
of attribute=value features it expresses. Everything downstream (statistics,
alignment, schema extraction) consumes these types.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError, NoInputError, UsageError, ValidationFailure

# punctuation peeled off token edges; internal occurrences are kept ("w-sw", "don't")
_EDGE_PUNCT = set(".,;:!?'\"()")

_KNOWN_KEYS = {"id", "text", "features"}


@dataclass(frozen=True)
class Feature:
    """One attribute=value pair, e.g. price=cheap."""

    attribute: str
    value: str

    def __post_init__(self):
        if not self.attribute or not self.value:
            raise ValidationFailure("feature attribute and value must be non-empty")
        if "=" in self.attribute:
            raise ValidationFailure(f"feature attribute may not contain '=': {self.attribute!r}")
        if "\n" in self.attribute or "\n" in self.value:
            raise ValidationFailure("feature attribute/value may not contain newlines")

    @property
    def key(self) -> str:
        return f"{self.attribute}={self.value}"

    @classmethod
    def parse(cls, key: str) -> "Feature":
        attr, sep, value = key.partition("=")
        if not sep or not attr or not value:
            raise DataError(f"not an attribute=value pair: {key!r}")
        return cls(attr, value)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return self.key


class FeatureCollection:
    """An ordered, duplicate-free set of features (the CC of an instance).

    Insertion order is preserved (it feeds first-occurrence universe order);
    equality is set-like on canonical keys.
    """

    __slots__ = ("_features",)

    def __init__(self, features=()):
        seen = {}
        for f in features:
            if isinstance(f, str):
                f = Feature.parse(f)
            seen.setdefault(f.key, f)
        self._features = tuple(seen.values())

    def __iter__(self):
        return iter(self._features)

    def __len__(self):
        return len(self._features)

    def __bool__(self):
        return bool(self._features)

    def __contains__(self, item):
        key = item.key if isinstance(item, Feature) else item
        return any(f.key == key for f in self._features)

    def keys(self) -> list[str]:
        return [f.key for f in self._features]

    def sorted_keys(self) -> list[str]:
        return sorted(f.key for f in self._features)

    def attributes(self) -> tuple[str, ...]:
        return tuple(sorted({f.attribute for f in self._features}))

    def union(self, other) -> "FeatureCollection":
        return FeatureCollection(list(self._features) + list(other))

    def __eq__(self, other):
        if not isinstance(other, FeatureCollection):
            return NotImplemented
        return frozenset(self.keys()) == frozenset(other.keys())

    def __hash__(self):
        return hash(frozenset(self.keys()))

    def __repr__(self):
        return f"FeatureCollection({self.sorted_keys()})"


@dataclass
class Instance:
    """A tokenized textual description paired with its feature collection."""

    id: str
    tokens: tuple[str, ...]
    cc: FeatureCollection
    raw_text: str = ""

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class Corpus:
    instances: list[Instance]
    feature_universe: FeatureCollection = field(default_factory=FeatureCollection)

    def __post_init__(self):
        universe = []
        for inst in self.instances:
            universe.extend(inst.cc)
        self.feature_universe = FeatureCollection(universe)
        self._by_id = {inst.id: inst for inst in self.instances}

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def get(self, instance_id: str) -> Instance:
        try:
            return self._by_id[instance_id]
        except KeyError:
            raise DataError(f"unknown instance id: {instance_id!r}") from None


def _split_edge_punct(chunk: str) -> list[str]:
    head, tail = [], []
    while chunk and chunk[0] in _EDGE_PUNCT:
        head.append(chunk[0])
        chunk = chunk[1:]
    while chunk and chunk[-1] in _EDGE_PUNCT:
        tail.append(chunk[-1])
        chunk = chunk[:-1]
    middle = [chunk] if chunk else []
    return head + middle + list(reversed(tail))


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, peel edge punctuation into own tokens.

    The full stop counts as a token of its own, so "cheap restaurant." yields
    three tokens. Joining the result with single spaces round-trips the input
    modulo whitespace and case.
    """
    if not text or not text.strip():
        raise DataError("cannot tokenize empty text")
    tokens = []
    for chunk in text.lower().split():
        tokens.extend(_split_edge_punct(chunk))
    return tokens


def parse_feature_list(spec) -> FeatureCollection:
    """Parse query features: 'a=v,a=v' or a list of 'a=v' strings."""
    if isinstance(spec, str):
        parts = [p.strip() for p in spec.split(",")]
    else:
        parts = [str(p).strip() for p in spec]
    feats = []
    for part in parts:
        if not part:
            continue
        attr, sep, value = part.partition("=")
        if not sep or not attr.strip() or not value.strip():
            raise UsageError(f"not an attribute=value feature: {part!r}")
        feats.append(Feature(attr.strip(), value.strip()))
    if not feats:
        raise UsageError("no features given")
    return FeatureCollection(feats)


def load_corpus(path) -> Corpus:
    """Read a JSONL corpus file: one {"id", "text", "features"} object per line."""
    path = Path(path)
    if not path.exists():
        raise NoInputError(f"corpus file not found: {path}")
    instances = []
    seen_ids = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{lineno}: expected a JSON object")
            unknown = set(obj) - _KNOWN_KEYS
            if unknown:
                warnings.warn(f"{path}:{lineno}: ignoring unknown keys {sorted(unknown)}")
            inst_id = obj.get("id")
            text = obj.get("text")
            if not isinstance(inst_id, str) or not inst_id:
                raise ValidationFailure(f"{path}:{lineno}: missing or empty id")
            if inst_id in seen_ids:
                raise ValidationFailure(f"{path}:{lineno}: duplicate instance id {inst_id!r}")
            if not isinstance(text, str) or not text.strip():
                raise ValidationFailure(f"{path}:{lineno}: missing or empty text")
            feats = []
            for k, raw in enumerate(obj.get("features", [])):
                if not isinstance(raw, dict) or "attr" not in raw or "value" not in raw:
                    raise DataError(f"{path}:{lineno}: feature {k} must have attr and value")
                feats.append(Feature(str(raw["attr"]), str(raw["value"])))
            seen_ids.add(inst_id)
            instances.append(Instance(inst_id, tuple(tokenize(text)), FeatureCollection(feats), text))
    if not instances:
        raise NoInputError(f"empty corpus: {path}")
    return Corpus(instances)


def save_corpus(corpus: Corpus, path) -> None:
    """Write the canonical JSONL serialization; load/save round-trips it."""
    if not corpus.instances:
        raise ValidationFailure("refusing to write an empty corpus")
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for inst in corpus.instances:
            obj = {
                "id": inst.id,
                "text": inst.raw_text or inst.text(),
                "features": [{"attr": f.attribute, "value": f.value} for f in inst.cc],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
