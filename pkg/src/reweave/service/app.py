"""FastAPI application exposing the pipeline: align, train, validate,
generate, synth, eval, and triangle inspection.

Errors surface as {"error": {"code", "message", ...}} envelopes; the code is
what the CLI maps back to exit codes.
"""
from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..align import AlignConfig
from ..corpus import parse_feature_list
from ..errors import BelowThresholdError, ReweaveError
from ..evaluate import run_eval
from ..generate import GenQuery, generate_k
from ..model_store import load_model, validate_model
from ..pipeline import run_align, run_train
from ..render import run_inspect
from ..synth import run_synth
from . import models as m

log = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "usage": 400,
    "no_input": 404,
    "data": 422,
    "validation": 409,
    "below_threshold": 409,
}


def _result_body(res, with_trace: bool) -> m.GeneratedText:
    cand = res.candidate
    return m.GeneratedText(
        text=res.text,
        weight=cand.weight,
        schema_index=cand.schema_index,
        schema_weight=cand.schema_weight,
        choices=[
            m.ChoiceBody(
                position=c.position,
                candidate=c.candidate,
                text=c.text,
                cc=list(c.cc_keys),
                weight=c.weight,
            )
            for c in cand.choices
        ],
        trace=res.trace if with_trace else None,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="reweave", version=__version__)

    @app.exception_handler(ReweaveError)
    async def reweave_error_handler(request: Request, exc: ReweaveError):
        body = {"error": {"code": exc.code, "message": str(exc)}}
        if isinstance(exc, BelowThresholdError) and exc.best is not None:
            body["error"]["best"] = _result_body(exc.best, with_trace=False).model_dump()
        return JSONResponse(status_code=_STATUS_BY_CODE.get(exc.code, 500), content=body)

    @app.exception_handler(Exception)
    async def unexpected_error_handler(request: Request, exc: Exception):
        log.exception("unhandled error for %s", request.url.path)
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal", "message": str(exc)}},
        )

    @app.get("/health", response_model=m.HealthResponse)
    def health():
        return m.HealthResponse(status="ok", version=__version__)

    @app.post("/corpus/align", response_model=m.AlignResponse)
    def align(req: m.AlignRequest):
        config = AlignConfig(sigma=req.sigma, neighbourhood=req.neighbourhood, max_len=req.max_len)
        return m.AlignResponse(**run_align(req.corpus_path, req.out_path, config, jobs=req.jobs))

    @app.post("/corpus/synth", response_model=m.SynthResponse)
    def synth(req: m.SynthRequest):
        return m.SynthResponse(**run_synth(req.templates_path, req.n, req.seed, req.out_path))

    @app.post("/model/train", response_model=m.TrainResponse)
    def train(req: m.TrainRequest):
        config = AlignConfig(sigma=req.sigma, neighbourhood=req.neighbourhood, max_len=req.max_len)
        return m.TrainResponse(**run_train(req.corpus_path, req.model_dir, config, jobs=req.jobs))

    @app.post("/model/validate", response_model=m.ValidateResponse)
    def validate(req: m.ValidateRequest):
        return m.ValidateResponse(**validate_model(req.model_dir))

    @app.post("/generate", response_model=m.GenerateResponse)
    def gen(req: m.GenerateRequest):
        model, _ = load_model(req.model_dir)
        query = GenQuery(
            cc=parse_feature_list(req.features),
            min_weight=req.min_weight,
            strict=req.strict,
            greedy=req.greedy,
        )
        results = generate_k(model, query, req.k)
        return m.GenerateResponse(results=[_result_body(r, req.trace) for r in results])

    @app.post("/eval", response_model=m.EvalResponse)
    def evaluate(req: m.EvalRequest):
        report = run_eval(req.model_dir, req.test_path, req.gold_align_path, jobs=req.jobs)
        return m.EvalResponse(**report.as_dict())

    @app.post("/inspect/triangle", response_model=m.InspectResponse)
    def inspect(req: m.InspectRequest):
        return m.InspectResponse(
            **run_inspect(
                req.corpus_path,
                req.instance_id,
                req.feature,
                metric=req.metric,
                fmt=req.format,
                sigma=req.sigma,
            )
        )

    return app


app = create_app()
