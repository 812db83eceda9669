"""Request/response bodies of the HTTP service."""
from __future__ import annotations

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel


class HealthResponse(BaseModel):
    status: str
    version: str


class AlignRequest(BaseModel):
    corpus_path: str
    out_path: str
    sigma: float = 0.5
    neighbourhood: str = "comparable"
    max_len: Optional[int] = None
    jobs: int = 1


class AlignResponse(BaseModel):
    instances: int
    feature_bearing_segments: int
    out_path: str


class TrainRequest(BaseModel):
    corpus_path: str
    model_dir: str
    sigma: float = 0.5
    neighbourhood: str = "comparable"
    max_len: Optional[int] = None
    jobs: int = 1


class TrainResponse(BaseModel):
    model_dir: str
    schemata: int
    fragment_datasets: int
    feature_universe: int
    model_digest: str


class ValidateRequest(BaseModel):
    model_dir: str


class ValidateResponse(BaseModel):
    schemata: int
    fragment_datasets: int
    feature_universe: int
    model_digest: str
    edited: bool
    retrained: bool


class GenerateRequest(BaseModel):
    model_dir: str
    features: Union[str, List[str]]
    k: int = 1
    min_weight: float = 0.0
    strict: bool = False
    greedy: bool = False
    trace: bool = False


class ChoiceBody(BaseModel):
    position: int
    candidate: int
    text: str
    cc: List[str]
    weight: float


class GeneratedText(BaseModel):
    text: str
    weight: float
    schema_index: int
    schema_weight: float
    choices: List[ChoiceBody]
    trace: Optional[List[Dict[str, Any]]] = None


class GenerateResponse(BaseModel):
    results: List[GeneratedText]


class SynthRequest(BaseModel):
    templates_path: str
    n: int
    seed: int
    out_path: str


class SynthResponse(BaseModel):
    instances: int
    out_path: str
    gold_path: str


class EvalRequest(BaseModel):
    model_dir: str
    test_path: str
    gold_align_path: Optional[str] = None
    jobs: int = 1


class AlignmentScores(BaseModel):
    precision: float
    recall: float
    f1: float


class EvalResponse(BaseModel):
    instances: int
    evaluated: int
    feature_coverage: float
    exact_match: float
    mean_weight: float
    alignment: Optional[AlignmentScores] = None


class InspectRequest(BaseModel):
    corpus_path: str
    instance_id: str
    feature: str
    metric: str = "weight"
    format: str = "text"
    sigma: float = 0.5


class InspectResponse(BaseModel):
    content: str
    cells: int
    format: str
