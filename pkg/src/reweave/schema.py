"""Schema extraction: aligned instances become placeholder/literal sequences.

A feature-bearing segment becomes a placeholder carrying the attribute set of
its features; an unaligned segment stays a literal token string. Two schemata
are the same iff their element sequences are equal; two placeholders are the
same iff they sit at the same position of the same schema.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .align import AlignedInstance
from .corpus import FeatureCollection
from .errors import DataError, ValidationFailure


@dataclass(frozen=True)
class Placeholder:
    attributes: tuple[str, ...]

    def __post_init__(self):
        if not self.attributes:
            raise ValidationFailure("placeholder needs at least one attribute")
        canon = tuple(sorted(set(self.attributes)))
        if canon != self.attributes:
            object.__setattr__(self, "attributes", canon)

    def __str__(self):
        return "[" + ",".join(self.attributes) + "]"


# a schema is a tuple whose elements are Placeholder instances or literal strings
Schema = tuple


def schema_placeholders(schema: Schema) -> list[Placeholder]:
    return [el for el in schema if isinstance(el, Placeholder)]


def to_schema(aligned: AlignedInstance):
    """Schema of one aligned instance, plus the fragment each placeholder held.

    Returns (schema, [(placeholder position, fragment text, aligned features)]).
    """
    elements = []
    extracted = []
    pos = 0
    for seg in aligned.segments:
        text = aligned.segment_text(seg)
        if seg.features:
            elements.append(Placeholder(seg.features.attributes()))
            extracted.append((pos, text, seg.features))
            pos += 1
        else:
            elements.append(text)
    return tuple(elements), extracted


@dataclass
class SchemaDataset:
    """Distinct schemata (training order) plus one (schema, full CC) record
    per aligned instance."""

    schemas: list[Schema] = field(default_factory=list)
    records: list[tuple[int, FeatureCollection]] = field(default_factory=list)

    def ccs_for(self, schema_index: int) -> list[FeatureCollection]:
        return [cc for idx, cc in self.records if idx == schema_index]


def build_datasets(aligned_corpus: list[AlignedInstance]):
    """Aggregate an aligned corpus into the schema dataset and the
    per-placeholder fragment datasets keyed by (schema index, position)."""
    if not aligned_corpus:
        raise DataError("cannot extract schemata from an empty aligned corpus")
    dataset = SchemaDataset()
    schema_ids: dict[Schema, int] = {}
    fragment_datasets: dict[tuple[int, int], list[tuple[str, FeatureCollection]]] = {}
    for ai in aligned_corpus:
        schema, extracted = to_schema(ai)
        idx = schema_ids.get(schema)
        if idx is None:
            idx = len(dataset.schemas)
            schema_ids[schema] = idx
            dataset.schemas.append(schema)
            for pos in range(len(schema_placeholders(schema))):
                fragment_datasets[(idx, pos)] = []
        dataset.records.append((idx, ai.instance.cc))
        for pos, text, cc in extracted:
            fragment_datasets[(idx, pos)].append((text, cc))
    return dataset, fragment_datasets
