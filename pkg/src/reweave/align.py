"""Fragment-to-feature alignment.

Per feature: score every fragment of the description with
weight = express * core, keep the local maxima of that score over the
inclusion lattice, drop maxima below the sigma threshold, group the
survivors into connected regions (immediate lattice adjacency), and align
the longest fragment of each region. Per instance: overlapping aligned
fragments of different features are replaced by their union, which inherits
both feature sets; the description is then split at the surviving borders.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Feature, FeatureCollection, Instance
from .errors import DataError, NoInputError, UsageError
from .lattice import Fragment
from ._parallel import parallel_map

log = logging.getLogger(__name__)

# weights inside one maxima region are expected to be equal; allow float fuzz
_REGION_TOL = 1e-9


@dataclass
class AlignConfig:
    sigma: float = 0.5
    neighbourhood: str = "comparable"  # maxima test scope; "adjacent" for strict +-1
    max_len: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.sigma <= 1.0):
            raise UsageError(f"sigma must be within [0, 1], got {self.sigma}")
        if self.neighbourhood not in ("comparable", "adjacent"):
            raise UsageError(f"unknown neighbourhood mode: {self.neighbourhood!r}")
        if self.max_len is not None and self.max_len < 1:
            raise UsageError("max_len must be positive or omitted")


@dataclass
class AlignedSegment:
    start: int
    end: int
    features: FeatureCollection

    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class AlignedInstance:
    instance: Instance
    segments: list[AlignedSegment]

    @property
    def id(self) -> str:
        return self.instance.id

    def segment_text(self, seg: AlignedSegment) -> str:
        return " ".join(self.instance.tokens[seg.start:seg.end])


def express(w: str, g, table) -> float:
    """Normalized lift of feature g given fragment w.

    (P(g|w) - P(g)) / (1 - P(g)) when the lift is positive; 0 when
    P(g|w) <= P(g); 0 when g appears in every instance (P(g) = 1), in which
    case the feature carries no information.
    """
    pg = table.p_feature(g)
    if pg >= 1.0:
        return 0.0
    delta = table.p_feature_given_fragment(g, w) - pg
    if delta <= 0.0:
        return 0.0
    return delta / (1.0 - pg)


def core(w: str, g, table) -> float:
    """P(w|g): how strongly the use of w depends on g. 0 for absent fragments."""
    if not table.known_fragment(w):
        return 0.0
    return table.p_fragment_given_feature(w, g)


def weight(w: str, g, table) -> float:
    """Alignment score: express * core. Zero whenever either factor is zero."""
    c = core(w, g, table)
    if c == 0.0:
        return 0.0
    return express(w, g, table) * c


def _span_weights(instance: Instance, g, table) -> dict[tuple[int, int], float]:
    toks = instance.tokens
    n = len(toks)
    out = {}
    for length in range(1, n + 1):
        for s in range(n - length + 1):
            out[(s, s + length)] = weight(" ".join(toks[s:s + length]), g, table)
    return out


def _is_maximum(span, wts, mode: str) -> bool:
    s, e = span
    v = wts[span]
    for (s2, e2), v2 in wts.items():
        if (s2, e2) == span:
            continue
        contained = s <= s2 and e2 <= e
        contains = s2 <= s and e <= e2
        if not (contained or contains):
            continue
        if mode == "adjacent" and abs((e2 - s2) - (e - s)) != 1:
            continue
        if v2 > v:
            return False
    return True


def _components(spans: list[tuple[int, int]]) -> list[list[tuple[int, int]]]:
    """Connected components under immediate lattice adjacency (containment
    with length difference one)."""
    def adjacent(a, b):
        la, lb = a[1] - a[0], b[1] - b[0]
        if abs(la - lb) != 1:
            return False
        inner, outer = (a, b) if la < lb else (b, a)
        return outer[0] <= inner[0] and inner[1] <= outer[1]

    comps, seen = [], set()
    for start_span in sorted(spans):
        if start_span in seen:
            continue
        comp, stack = [], [start_span]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            comp.append(cur)
            stack.extend(other for other in spans if other not in seen and adjacent(cur, other))
        comps.append(sorted(comp))
    return comps


def _split_equal_value(comp, wts):
    """Regions are expected to hold one weight value; if not, split by value
    and report, rather than guessing which sub-region was meant."""
    values = sorted({wts[s] for s in comp})
    groups = [[values[0]]]
    for v in values[1:]:
        if math.isclose(v, groups[-1][-1], rel_tol=_REGION_TOL, abs_tol=_REGION_TOL):
            groups[-1].append(v)
        else:
            groups.append([v])
    if len(groups) == 1:
        return [comp]
    log.warning("maxima region with unequal weights %s; splitting by value", values)
    out = []
    for grp in groups:
        members = [s for s in comp if any(math.isclose(wts[s], v, rel_tol=_REGION_TOL, abs_tol=_REGION_TOL) for v in grp)]
        out.extend(_components(members))
    return out


def align_feature(instance: Instance, g, table, config: AlignConfig | None = None) -> list[Fragment]:
    """Fragments of the instance aligned to feature g; possibly several
    (one per maxima region), possibly none."""
    config = config or AlignConfig()
    wts = _span_weights(instance, g, table)
    # spans below sigma are dropped after the maxima test; maxima status does
    # not depend on sigma, so skip testing them at all
    survivors = [
        span for span, v in wts.items()
        if v >= config.sigma and _is_maximum(span, wts, config.neighbourhood)
    ]
    aligned = []
    for comp in _components(survivors):
        for region in _split_equal_value(comp, wts):
            best = max(region, key=lambda sp: (sp[1] - sp[0], -sp[0]))
            aligned.append(Fragment(instance.id, best[0], best[1]))
    return sorted(aligned)


def weight_maxima(instance: Instance, g, table, neighbourhood: str = "comparable") -> set:
    """Spans whose weight is >= that of every inclusion-comparable span
    (no sigma cut); what the triangle rendering outlines."""
    wts = _span_weights(instance, g, table)
    return {span for span in wts if _is_maximum(span, wts, neighbourhood)}


def merge_overlapping(fragments):
    """Union-merge overlapping (span, feature set) pairs to a fixpoint.

    The union inherits both feature sets. The result is independent of input
    order: it is the overlap-closure partition of the spans.
    """
    items = [((s, e), frozenset(feats)) for (s, e), feats in fragments]
    changed = True
    while changed:
        changed = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                (s1, e1), f1 = items[i]
                (s2, e2), f2 = items[j]
                if s1 < e2 and s2 < e1:
                    merged = ((min(s1, s2), max(e1, e2)), f1 | f2)
                    items = [it for k, it in enumerate(items) if k not in (i, j)]
                    items.append(merged)
                    changed = True
                    break
            if changed:
                break
    return sorted(items)


def align_instance(instance: Instance, table, config: AlignConfig | None = None) -> AlignedInstance:
    config = config or AlignConfig()
    raw = []
    for feat in sorted(instance.cc):
        for frag in align_feature(instance, feat, table, config):
            raw.append(((frag.start, frag.end), frozenset([feat.key])))
    merged = merge_overlapping(raw)
    segments = []
    pos = 0
    for (s, e), feat_keys in merged:
        if pos < s:
            segments.append(AlignedSegment(pos, s, FeatureCollection()))
        segments.append(AlignedSegment(s, e, FeatureCollection(sorted(feat_keys))))
        pos = e
    if pos < len(instance.tokens):
        segments.append(AlignedSegment(pos, len(instance.tokens), FeatureCollection()))
    return AlignedInstance(instance, segments)


def _align_one(payload, instance):
    table, config = payload
    return align_instance(instance, table, config)


def align_corpus(corpus: Corpus, config: AlignConfig | None = None, jobs: int = 1) -> list[AlignedInstance]:
    """Align every instance; the table is built once, output keeps corpus order."""
    config = config or AlignConfig()
    from .stats import CooccurrenceTable

    table = CooccurrenceTable.build(corpus, max_len=config.max_len)
    return parallel_map(_align_one, (table, config), corpus.instances, jobs)


def write_aligned(aligned: list[AlignedInstance], path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ai in aligned:
            obj = {
                "id": ai.id,
                "tokens": list(ai.instance.tokens),
                "segments": [
                    {"start": seg.start, "end": seg.end, "features": seg.features.sorted_keys()}
                    for seg in ai.segments
                ],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_aligned(path) -> list[dict]:
    """Raw aligned records ({"id", "tokens", "segments"}), e.g. gold files."""
    path = Path(path)
    if not path.exists():
        raise NoInputError(f"aligned file not found: {path}")
    records = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from None
            records.append(obj)
    if not records:
        raise NoInputError(f"empty aligned file: {path}")
    return records


def aligned_to_instances(corpus: Corpus, records: list[dict]) -> list[AlignedInstance]:
    """Join raw aligned records back to corpus instances by id."""
    out = []
    for rec in records:
        inst = corpus.get(rec["id"])
        segs = [
            AlignedSegment(s["start"], s["end"], FeatureCollection(s.get("features", [])))
            for s in rec["segments"]
        ]
        out.append(AlignedInstance(inst, segs))
    return out
