"""Command-line client for the reweave service.

Every subcommand builds a request and sends it to the HTTP API. By default
the app is mounted in-process (no server needed); point --server (or
REWEAVE_SERVER) at a running instance to operate remotely.

Exit codes: 0 success, 2 validation failure, 3 below-threshold,
64 usage error, 65 bad data, 66 missing/empty input.
"""
from __future__ import annotations

import json
import sys
import warnings

import click
import httpx

from ._parallel import resolve_jobs
from .corpus import parse_feature_list
from .errors import (
    EX_BELOW_THRESHOLD,
    EX_DATA,
    EX_NOINPUT,
    EX_USAGE,
    EX_VALIDATION,
    ReweaveError,
    UsageError,
)

_EXIT_BY_CODE = {
    "usage": EX_USAGE,
    "no_input": EX_NOINPUT,
    "data": EX_DATA,
    "validation": EX_VALIDATION,
    "below_threshold": EX_BELOW_THRESHOLD,
}


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=httpx.Timeout(600.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette warns about its httpx test client
        from fastapi.testclient import TestClient

        from .service.app import create_app

        return TestClient(create_app(), raise_server_exceptions=False)


def _post(ctx, path: str, payload: dict) -> dict:
    with _client(ctx.obj.get("server")) as client:
        try:
            resp = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: cannot reach server: {exc}", err=True)
            sys.exit(1)
    if resp.status_code < 400:
        return resp.json()
    try:
        err = resp.json()["error"]
    except Exception:
        click.echo(f"error: HTTP {resp.status_code}: {resp.text[:400]}", err=True)
        sys.exit(1)
    click.echo(f"error: {err.get('message', err.get('code'))}", err=True)
    best = err.get("best")
    if best:
        click.echo(
            f"best rejected candidate: {best['text']!r} (weight {best['weight']:.6f})",
            err=True,
        )
    sys.exit(_EXIT_BY_CODE.get(err.get("code"), 1))


def _usage_fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EX_USAGE)


def _check_sigma(sigma: float):
    if not (0.0 <= sigma <= 1.0):
        _usage_fail(f"sigma must be within [0, 1], got {sigma}")


def _jobs_or_die(jobs):
    try:
        return resolve_jobs(jobs)
    except UsageError as exc:
        _usage_fail(str(exc))


@click.group()
@click.option("--server", envvar="REWEAVE_SERVER", default=None, metavar="URL",
              help="Base URL of a running reweave service; default runs in-process.")
@click.version_option()
@click.pass_context
def main(ctx, server):
    """Learn fragment/feature alignments from a data-text corpus and generate
    new texts by reassembling the learned fragments."""
    ctx.obj = {"server": server}


@main.command()
@click.option("--corpus", "corpus_path", required=True, metavar="PATH")
@click.option("--out", "out_path", required=True, metavar="PATH")
@click.option("--sigma", default=0.5, show_default=True)
@click.option("--jobs", default=None, type=int, help="Worker processes (default: all cores).")
@click.pass_context
def align(ctx, corpus_path, out_path, sigma, jobs):
    """Align a corpus and write the segment/feature mapping as JSONL."""
    _check_sigma(sigma)
    body = _post(ctx, "/corpus/align", {
        "corpus_path": corpus_path,
        "out_path": out_path,
        "sigma": sigma,
        "jobs": _jobs_or_die(jobs),
    })
    click.echo(
        f"aligned {body['instances']} instances, "
        f"{body['feature_bearing_segments']} feature-bearing segments -> {body['out_path']}"
    )


@main.command()
@click.option("--corpus", "corpus_path", required=True, metavar="PATH")
@click.option("--model", "model_dir", required=True, metavar="DIR")
@click.option("--sigma", default=0.5, show_default=True)
@click.option("--jobs", default=None, type=int)
@click.pass_context
def train(ctx, corpus_path, model_dir, sigma, jobs):
    """Full pipeline: align, extract schemata, train selectors, write model."""
    _check_sigma(sigma)
    body = _post(ctx, "/model/train", {
        "corpus_path": corpus_path,
        "model_dir": model_dir,
        "sigma": sigma,
        "jobs": _jobs_or_die(jobs),
    })
    click.echo(
        f"trained {body['schemata']} schemata, {body['fragment_datasets']} fragment datasets, "
        f"{body['feature_universe']} features -> {body['model_dir']}"
    )


@main.command()
@click.option("--model", "model_dir", required=True, metavar="DIR")
@click.pass_context
def validate(ctx, model_dir):
    """Check hand-edited model files and retrain the selectors."""
    body = _post(ctx, "/model/validate", {"model_dir": model_dir})
    state = "edited; " if body["edited"] else ""
    click.echo(
        f"model valid ({state}selectors retrained): {body['schemata']} schemata, "
        f"{body['fragment_datasets']} fragment datasets, {body['feature_universe']} features"
    )


@main.command()
@click.option("--model", "model_dir", required=True, metavar="DIR")
@click.option("--features", required=True, metavar='"a=v,a=v"')
@click.option("--k", default=1, show_default=True, type=int)
@click.option("--min-weight", default=0.0, show_default=True)
@click.option("--strict", is_flag=True, help="Only schemata whose placeholders are covered by the query.")
@click.option("--greedy", is_flag=True, help="Pick the best schema first, then fill it (cheaper, not optimal).")
@click.option("--trace", is_flag=True, help="Emit JSON with the full selection trace.")
@click.pass_context
def generate(ctx, model_dir, features, k, min_weight, strict, greedy, trace):
    """Generate text(s) for a feature collection."""
    try:
        parse_feature_list(features)
    except ReweaveError as exc:
        _usage_fail(str(exc))
    if k < 1:
        _usage_fail(f"k must be >= 1, got {k}")
    if not (0.0 <= min_weight <= 1.0):
        _usage_fail(f"min-weight must be within [0, 1], got {min_weight}")
    body = _post(ctx, "/generate", {
        "model_dir": model_dir,
        "features": features,
        "k": k,
        "min_weight": min_weight,
        "strict": strict,
        "greedy": greedy,
        "trace": trace,
    })
    for res in body["results"]:
        if trace:
            click.echo(json.dumps({
                "text": res["text"],
                "weight": res["weight"],
                "schema_index": res["schema_index"],
                "choices": res["choices"],
                "trace": res["trace"],
            }, ensure_ascii=False))
        else:
            click.echo(res["text"])


@main.command()
@click.option("--templates", "templates_path", required=True, metavar="PATH")
@click.option("--n", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", required=True, metavar="PATH")
@click.pass_context
def synth(ctx, templates_path, n, seed, out_path):
    """Sample a synthetic corpus (plus gold alignment) from templates."""
    if n < 1:
        _usage_fail(f"n must be >= 1, got {n}")
    body = _post(ctx, "/corpus/synth", {
        "templates_path": templates_path,
        "n": n,
        "seed": seed,
        "out_path": out_path,
    })
    click.echo(f"wrote {body['instances']} instances -> {body['out_path']} (gold: {body['gold_path']})")


@main.command("eval")
@click.option("--model", "model_dir", required=True, metavar="DIR")
@click.option("--test", "test_path", required=True, metavar="PATH")
@click.option("--gold-align", "gold_align_path", default=None, metavar="PATH")
@click.option("--jobs", default=None, type=int)
@click.pass_context
def eval_cmd(ctx, model_dir, test_path, gold_align_path, jobs):
    """Reconstruction metrics on a test corpus; optional gold-alignment F1."""
    body = _post(ctx, "/eval", {
        "model_dir": model_dir,
        "test_path": test_path,
        "gold_align_path": gold_align_path,
        "jobs": _jobs_or_die(jobs),
    })
    click.echo(f"instances: {body['instances']} (evaluated: {body['evaluated']})")
    click.echo(f"feature_coverage: {body['feature_coverage']:.4f}")
    click.echo(f"exact_match: {body['exact_match']:.4f}")
    click.echo(f"mean_weight: {body['mean_weight']:.4f}")
    if body.get("alignment"):
        a = body["alignment"]
        click.echo(
            f"alignment: precision={a['precision']:.4f} recall={a['recall']:.4f} f1={a['f1']:.4f}"
        )


@main.command("inspect-triangle")
@click.option("--corpus", "corpus_path", required=True, metavar="PATH")
@click.option("--instance", "instance_id", required=True, metavar="ID")
@click.option("--feature", required=True, metavar='"a=v"')
@click.option("--metric", default="weight", show_default=True,
              type=click.Choice(["express", "core", "weight"]))
@click.option("--format", "fmt", default="text", show_default=True,
              type=click.Choice(["text", "svg"]))
@click.option("--sigma", default=0.5, show_default=True)
@click.pass_context
def inspect_triangle(ctx, corpus_path, instance_id, feature, metric, fmt, sigma):
    """Render the fragment triangle of one instance against one feature."""
    _check_sigma(sigma)
    body = _post(ctx, "/inspect/triangle", {
        "corpus_path": corpus_path,
        "instance_id": instance_id,
        "feature": feature,
        "metric": metric,
        "format": fmt,
        "sigma": sigma,
    })
    click.echo(body["content"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("reweave.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
