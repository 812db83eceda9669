"""Evaluation: self/test reconstruction metrics and gold-alignment scoring."""
from __future__ import annotations

from dataclasses import dataclass

from .align import AlignConfig, align_corpus, read_aligned
from .corpus import Corpus, load_corpus
from .errors import ReweaveError, UsageError
from .generate import GenQuery, generate
from .model_store import load_model


@dataclass
class EvalReport:
    instances: int
    evaluated: int  # instances with a non-empty feature collection
    feature_coverage: float
    exact_match: float
    mean_weight: float
    alignment: dict | None = None  # precision/recall/f1 when gold is given

    def as_dict(self) -> dict:
        out = {
            "instances": self.instances,
            "evaluated": self.evaluated,
            "feature_coverage": self.feature_coverage,
            "exact_match": self.exact_match,
            "mean_weight": self.mean_weight,
        }
        if self.alignment is not None:
            out["alignment"] = self.alignment
        return out


def evaluate_generation(model, corpus: Corpus):
    """Generate from each instance's CC and compare against its text.

    feature_coverage counts a query feature as realized when some chosen
    fragment's record CC contains it (micro-averaged over all query features).
    Instances with an empty CC cannot be queried and are skipped.
    """
    total_feats = 0
    covered_feats = 0
    exact = 0
    weights = []
    evaluated = 0
    for inst in corpus:
        if not inst.cc:
            continue
        evaluated += 1
        query_keys = set(inst.cc.keys())
        total_feats += len(query_keys)
        try:
            result = generate(model, GenQuery(cc=inst.cc))
        except ReweaveError:
            weights.append(0.0)
            continue
        realized = set()
        for choice in result.candidate.choices:
            realized.update(choice.cc_keys)
        covered_feats += len(query_keys & realized)
        weights.append(result.candidate.weight)
        if result.text == inst.text():
            exact += 1
    return {
        "evaluated": evaluated,
        "feature_coverage": covered_feats / total_feats if total_feats else 0.0,
        "exact_match": exact / evaluated if evaluated else 0.0,
        "mean_weight": sum(weights) / len(weights) if weights else 0.0,
    }


def _segment_pairs(records) -> set:
    pairs = set()
    for rec in records:
        for seg in rec["segments"]:
            for key in seg.get("features", []):
                pairs.add((rec["id"], seg["start"], seg["end"], key))
    return pairs


def evaluate_alignment(corpus: Corpus, gold_records: list[dict], config: AlignConfig, jobs: int = 1) -> dict:
    """Precision/recall/F1 of (span, feature) pairs against a gold alignment."""
    aligned = align_corpus(corpus, config, jobs=jobs)
    predicted = set()
    for ai in aligned:
        for seg in ai.segments:
            for key in seg.features.keys():
                predicted.add((ai.id, seg.start, seg.end, key))
    gold = _segment_pairs(gold_records)
    tp = len(predicted & gold)
    precision = tp / len(predicted) if predicted else 1.0
    recall = tp / len(gold) if gold else 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f1": f1}


def run_eval(model_dir, test_path, gold_align_path=None, jobs: int = 1) -> EvalReport:
    model, meta = load_model(model_dir)
    corpus = load_corpus(test_path)
    gen = evaluate_generation(model, corpus)
    alignment = None
    if gold_align_path is not None:
        cfg_raw = meta.get("config", {})
        try:
            config = AlignConfig(
                sigma=cfg_raw.get("sigma", 0.5),
                neighbourhood=cfg_raw.get("neighbourhood", "comparable"),
                max_len=cfg_raw.get("max_len"),
            )
        except UsageError:
            config = AlignConfig()
        gold_records = read_aligned(gold_align_path)
        alignment = evaluate_alignment(corpus, gold_records, config, jobs=jobs)
    return EvalReport(
        instances=len(corpus),
        evaluated=gen["evaluated"],
        feature_coverage=gen["feature_coverage"],
        exact_match=gen["exact_match"],
        mean_weight=gen["mean_weight"],
        alignment=alignment,
    )
