"""Two-step generation: pick a schema, fill its placeholders, maximize the
min-based appropriation weight over whole candidates.

The appropriation weight P(x) of a candidate is the minimum of its clamped
component weights (schema weight plus one weight per filled placeholder).
The search is best-first over partial candidates ordered by min-so-far;
fixing a further component can only lower the min, so the first completed
candidate popped is the argmax. A greedy mode (best schema first, then best
fragment per slot) is available as the cheaper variant.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .corpus import FeatureCollection
from .errors import (
    BelowThresholdError,
    DataError,
    NoFragmentCandidateError,
    NoSchemaError,
    UsageError,
)
from .schema import Placeholder, Schema, schema_placeholders
from .selector import FeatureIndex, Selector

_MONOTONE_TOL = 1e-12


@dataclass
class GenQuery:
    cc: FeatureCollection
    min_weight: float = 0.0
    strict: bool = False
    greedy: bool = False

    def __post_init__(self):
        if not self.cc:
            raise UsageError("generation query needs at least one feature")
        if not (0.0 <= self.min_weight <= 1.0):
            raise UsageError(f"min_weight must be within [0, 1], got {self.min_weight}")


@dataclass
class Choice:
    position: int
    candidate: int  # index into the slot's candidate list (training order)
    text: str
    cc_keys: tuple[str, ...]
    weight: float  # raw selection weight


@dataclass
class Candidate:
    schema_index: int
    schema_weight: float  # raw
    choices: list[Choice]
    weight: float  # P(x): min of clamped component weights


@dataclass
class GenResult:
    text: str
    candidate: Candidate
    trace: list[dict] = field(default_factory=list)


@dataclass
class GenerationModel:
    """Trained artifacts generation runs against (built by the model store)."""

    index: FeatureIndex
    schemas: list[Schema]
    schema_selector: Selector  # items are schema indices
    slot_candidates: dict  # (schema idx, position) -> list of (text, cc_keys)
    slot_selectors: dict  # (schema idx, position) -> Selector


def clamp(w: float) -> float:
    return 0.0 if w < 0.0 else (1.0 if w > 1.0 else w)


def appropriation_weight(weights) -> float:
    """Minimum of the clamped component weights."""
    ws = list(weights)
    if not ws:
        raise DataError("appropriation weight of an empty candidate")
    return min(clamp(w) for w in ws)


def fill(schema: Schema, choices) -> str:
    """Replace placeholders (in order) by the chosen fragment texts."""
    texts = list(choices)
    n_slots = len(schema_placeholders(schema))
    if len(texts) != n_slots:
        raise DataError(f"schema has {n_slots} placeholders, got {len(texts)} choices")
    out = []
    k = 0
    for el in schema:
        if isinstance(el, Placeholder):
            out.append(texts[k])
            k += 1
        else:
            out.append(el)
    return " ".join(part for part in out if part)


def _search(model: GenerationModel, query: GenQuery):
    """Yield GenResults in non-increasing P(x); deterministic tie order
    (schema training order, then fragment ranks)."""
    if not model.schemas:
        raise NoSchemaError("model holds no schemata")
    kstar, _ = model.index.encode(query.cc)
    schema_w = model.schema_selector.weights(kstar)

    trace = [
        {"kind": "schema", "index": int(i), "weight": float(schema_w[pos])}
        for pos, i in enumerate(model.schema_selector.items)
    ]
    weight_of_schema = {int(i): float(schema_w[pos]) for pos, i in enumerate(model.schema_selector.items)}

    query_attrs = set(query.cc.attributes())
    eligible = []
    for idx in range(len(model.schemas)):
        placeholders = schema_placeholders(model.schemas[idx])
        if query.strict and any(not set(ph.attributes) <= query_attrs for ph in placeholders):
            continue
        eligible.append(idx)
    if not eligible:
        raise NoSchemaError("no schema is eligible for this query (strict mode)")

    if query.greedy:
        best = max(eligible, key=lambda i: (weight_of_schema[i], -i))
        eligible = [best]

    # per (schema, slot): candidates ranked by weight desc, training order on ties
    ranked: dict[tuple[int, int], list[tuple[int, float]]] = {}
    for idx in eligible:
        n_slots = len(schema_placeholders(model.schemas[idx]))
        for pos in range(n_slots):
            cands = model.slot_candidates.get((idx, pos), [])
            if not cands:
                raise NoFragmentCandidateError(
                    f"schema {idx} placeholder {pos} has an empty fragment dataset"
                )
            order = model.slot_selectors[(idx, pos)].select(kstar)
            ranked[(idx, pos)] = order
            for cand_pos, w in order:
                text, cc_keys = cands[cand_pos]
                trace.append(
                    {
                        "kind": "fragment",
                        "schema": idx,
                        "position": pos,
                        "candidate": cand_pos,
                        "text": text,
                        "weight": float(w),
                    }
                )

    def state_value(idx, rank_tuple):
        parts = [weight_of_schema[idx]]
        for pos, rank in enumerate(rank_tuple):
            parts.append(ranked[(idx, pos)][rank][1])
        return appropriation_weight(parts)

    heap = []
    visited = set()
    for idx in eligible:
        n_slots = len(schema_placeholders(model.schemas[idx]))
        root = (idx, (0,) * n_slots)
        heapq.heappush(heap, (-state_value(idx, root[1]), idx, root[1]))
        visited.add(root)

    while heap:
        neg_p, idx, rank_tuple = heapq.heappop(heap)
        p = -neg_p
        choices = []
        for pos, rank in enumerate(rank_tuple):
            cand_pos, w = ranked[(idx, pos)][rank]
            text, cc_keys = model.slot_candidates[(idx, pos)][cand_pos]
            choices.append(Choice(pos, cand_pos, text, cc_keys, float(w)))
        candidate = Candidate(idx, weight_of_schema[idx], choices, p)
        yield GenResult(fill(model.schemas[idx], [c.text for c in choices]), candidate, trace)
        for pos in range(len(rank_tuple)):
            if rank_tuple[pos] + 1 < len(ranked[(idx, pos)]):
                nxt = rank_tuple[:pos] + (rank_tuple[pos] + 1,) + rank_tuple[pos + 1:]
                if (idx, nxt) not in visited:
                    visited.add((idx, nxt))
                    child_p = state_value(idx, nxt)
                    # fixing a lower-ranked fragment can never raise the min
                    assert child_p <= p + _MONOTONE_TOL
                    heapq.heappush(heap, (-child_p, idx, nxt))


def generate(model: GenerationModel, query: GenQuery) -> GenResult:
    """The candidate maximizing P(x); BelowThresholdError when even the best
    falls under query.min_weight (the error carries it for inspection)."""
    best = next(_search(model, query))
    if best.candidate.weight < query.min_weight:
        raise BelowThresholdError(
            f"best candidate weight {best.candidate.weight:.6f} is below "
            f"min_weight {query.min_weight}",
            best=best,
        )
    return best


def generate_k(model: GenerationModel, query: GenQuery, k: int) -> list[GenResult]:
    """Top-k distinct texts by P(x) (first result equals generate's)."""
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    results = []
    seen_texts = set()
    best = None
    for res in _search(model, query):
        if best is None:
            best = res
        if res.text in seen_texts:
            continue
        if res.candidate.weight < query.min_weight:
            break
        seen_texts.add(res.text)
        results.append(res)
        if len(results) == k:
            break
    if not results:
        raise BelowThresholdError(
            f"best candidate weight {best.candidate.weight:.6f} is below "
            f"min_weight {query.min_weight}",
            best=best,
        )
    return results
