"""Orchestration: corpus -> aligned corpus -> datasets -> trained model."""
from __future__ import annotations

from pathlib import Path

from .align import AlignConfig, align_corpus, write_aligned
from .corpus import load_corpus
from .model_store import file_sha256, write_model
from .schema import build_datasets


def run_align(corpus_path, out_path, config: AlignConfig | None = None, jobs: int = 1) -> dict:
    corpus = load_corpus(corpus_path)
    aligned = align_corpus(corpus, config, jobs=jobs)
    write_aligned(aligned, out_path)
    return {
        "instances": len(aligned),
        "feature_bearing_segments": sum(
            1 for ai in aligned for seg in ai.segments if seg.features
        ),
        "out_path": str(Path(out_path)),
    }


def run_train(corpus_path, model_dir, config: AlignConfig | None = None, jobs: int = 1) -> dict:
    corpus = load_corpus(corpus_path)
    aligned = align_corpus(corpus, config, jobs=jobs)
    schema_dataset, fragment_datasets = build_datasets(aligned)
    summary = write_model(
        model_dir,
        aligned=aligned,
        schema_dataset=schema_dataset,
        fragment_datasets=fragment_datasets,
        config=config or AlignConfig(),
        corpus_digest=file_sha256(corpus_path),
    )
    summary["model_dir"] = str(Path(model_dir))
    return summary
