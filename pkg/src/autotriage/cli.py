"""Command-line interface.

The offline harness commands (ingest-ait, featurize, train, evaluate,
curve, correlate, synth-data) run the library directly on files. The live
commands are thin clients: ``serve`` starts the HTTP service and
``replay`` drives a running service over its API.
"""
from __future__ import annotations

import heapq
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .evaluation import (
    curve_table,
    discover_files,
    featurize,
    generate_ait_like,
    ingest_ait,
    reduction_fnr_curve,
    run_experiment,
    stream_from_jsonl,
    window_correlation_report,
    write_stream_jsonl,
)
from .features import FeatureConfig
from .features.vector import read_feature_dump, write_feature_dump
from .models import (
    ForestParams,
    GbdtParams,
    LogisticParams,
    TrainingSet,
    deserialize,
    predict_matrix,
    serialize,
    train_forest,
    train_gbdt,
    train_logistic,
)


def _feature_config(workflow: str, windows: str | None = None) -> FeatureConfig:
    config = FeatureConfig.ait() if workflow == "ait" else FeatureConfig.full()
    if windows:
        from dataclasses import replace

        from .features import WindowSpec

        deltas = tuple(sorted(float(d) * 86400.0 for d in windows.split(",")))
        config = replace(config, windows=WindowSpec(deltas=deltas,
                                                    short_only=(deltas[0],)))
    return config


@click.group()
@click.version_option(__version__)
def main():
    """Streaming alert triage: offline evaluation harness and live service."""


@main.command("synth-data")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=7, show_default=True)
@click.option("--tenants", default=8, show_default=True)
@click.option("--days", default=21.0, show_default=True)
@click.option("--categories", default=93, show_default=True)
@click.option("--hosts", default=24, show_default=True)
@click.option("--alerts-per-day", default=450.0, show_default=True,
              help="background alerts per tenant per day")
def synth_data(out_dir, seed, tenants, days, categories, hosts, alerts_per_day):
    """Generate a synthetic multi-tenant dataset in the AIT file schema."""
    paths = generate_ait_like(out_dir, seed=seed, n_tenants=tenants, days=days,
                              n_categories=categories, hosts_per_tenant=hosts,
                              alerts_per_tenant_per_day=alerts_per_day)
    click.echo(f"wrote {len(paths)} tenant files under {out_dir}")


@main.command("ingest-ait")
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--jitter-seed", default=0, show_default=True)
def ingest_ait_cmd(data_dir, out_path, jitter_seed):
    """Normalize AIT alert files into one chronological JSONL stream."""
    files = discover_files(data_dir)
    if not files:
        raise click.ClickException(f"no alert files found under {data_dir}")
    stream, stats = ingest_ait(files, jitter_seed=jitter_seed)
    with open(out_path, "w", encoding="utf-8") as fh:
        write_stream_jsonl(fh, stream)
    click.echo(
        f"alerts={stats.total} malformed={stats.malformed} "
        f"categories={stats.categories} tenants={stats.tenants} "
        f"malicious={stats.malicious}"
    )


@main.command("featurize")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--workflow", type=click.Choice(["full", "ait"]), default="full",
              show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--windows", default=None,
              help="comma-separated lookback windows in days, e.g. 1,7,30")
@click.option("--warmup-days", type=float, default=None,
              help="override the warm-up prefix (days) used only to seed counters")
def featurize_cmd(input_path, workflow, out_path, windows, warmup_days):
    """Replay a normalized stream and dump one feature row per alert."""
    config = _feature_config(workflow, windows)
    with open(input_path, "r", encoding="utf-8") as fh:
        stream = stream_from_jsonl(fh)
    warmup = None if warmup_days is None else warmup_days * 86400.0
    table = featurize(stream, config, warmup=warmup)
    with open(out_path, "w", encoding="utf-8") as fh:
        write_feature_dump(fh, table.names, table.ids, table.tenants,
                           table.timestamps, table.labels, table.X)
    click.echo(f"wrote {len(table.ids)} rows x {len(table.names)} slots to {out_path}")



def _load_training_set(features_path: str) -> TrainingSet:
    with open(features_path, "r", encoding="utf-8") as fh:
        names, ids, _tenants, timestamps, labels, X = read_feature_dump(fh)
    keep = labels >= 0
    return TrainingSet(
        X=X[keep], y=labels[keep], timestamps=timestamps[keep],
        alert_ids=[i for i, ok in zip(ids, keep) if ok], feature_names=names,
    )


@main.command()
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--model", "model_kind", type=click.Choice(["gbdt", "logistic", "forest"]),
              default="gbdt", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--n-trees", default=100, show_default=True)
@click.option("--max-depth", default=3, show_default=True)
@click.option("--learning-rate", default=0.1, show_default=True)
def train(features_path, out_path, model_kind, seed, n_trees, max_depth, learning_rate):
    """Train a classifier on a feature dump and write the model artifact."""
    data = _load_training_set(features_path).sorted_by_time()
    if model_kind == "gbdt":
        artifact = train_gbdt(data, GbdtParams(
            n_trees=n_trees, max_depth=max_depth, learning_rate=learning_rate, seed=seed))
    elif model_kind == "logistic":
        artifact = train_logistic(data, LogisticParams(seed=seed))
    else:
        artifact = train_forest(data, ForestParams(n_trees=n_trees, seed=seed))
    Path(out_path).write_bytes(serialize(artifact))
    click.echo(f"trained {model_kind} on {len(data)} rows -> {out_path}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--workflow", type=click.Choice(["full", "ait"]), default="ait",
              show_default=True)
@click.option("--folds", default=2, show_default=True)
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--model", "model_kind", type=click.Choice(["gbdt", "logistic", "forest"]),
              default="gbdt", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--subsample", type=float, default=None,
              help="seeded per-tenant alert fraction for a desk-scale run")
@click.option("--windows", default=None,
              help="comma-separated lookback windows in days, e.g. 1,7,30")
@click.option("--warmup-days", type=float, default=None)
@click.option("--out-dir", type=click.Path(), default=None,
              help="write metrics.csv, features.csv and per-fold artifacts here")
def evaluate(input_path, workflow, folds, threshold, model_kind, seed, subsample,
             windows, warmup_days, out_dir):
    """Time-series cross validation with the rate baseline comparison."""
    config = _feature_config(workflow, windows)
    with open(input_path, "r", encoding="utf-8") as fh:
        stream = stream_from_jsonl(fh)
    if subsample is not None:
        stream = stream.subsample_per_tenant(subsample, seed=seed)
    warmup = None if warmup_days is None else warmup_days * 86400.0
    result = run_experiment(stream, config, k=folds, model_kind=model_kind,
                            threshold=threshold, seed=seed, warmup=warmup)
    click.echo(result.metrics_table(), nl=False)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.csv").write_text(result.metrics_table())
        table = result.table
        with open(out / "features.csv", "w", encoding="utf-8") as fh:
            write_feature_dump(fh, table.names, table.ids, table.tenants,
                               table.timestamps, table.labels, table.X)
        for i, blob in enumerate(result.artifacts):
            (out / f"fold{i}.model.json").write_bytes(blob)
        click.echo(f"artifacts under {out_dir}")


@main.command()
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--thresholds", default="0,0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
              show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def curve(features_path, model_path, thresholds, out_path):
    """Alert-reduction vs FNR table over a threshold sweep."""
    data = _load_training_set(features_path)
    artifact = deserialize(Path(model_path).read_bytes())
    scores = predict_matrix(artifact, data.X)
    points = reduction_fnr_curve(scores, data.y, sorted(float(v) for v in
                                                        thresholds.split(",")))
    text = curve_table(points)
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--columns", default=None,
              help="comma-separated slot names; default: every rate slot plus the label")
@click.option("--out", "out_path", type=click.Path(), default=None)
def correlate(features_path, columns, out_path):
    """Pearson correlation report for window pruning decisions."""
    with open(features_path, "r", encoding="utf-8") as fh:
        names, _ids, _tenants, _ts, labels, X = read_feature_dump(fh)
    keep = labels >= 0
    X, labels = X[keep], labels[keep]
    if columns:
        wanted = [c.strip() for c in columns.split(",")]
    else:
        wanted = [n for n in names if "rate" in n]
    idx = [names.index(c) for c in wanted]
    matrix = np.column_stack([X[:, idx], labels.astype(float)])
    report = window_correlation_report(wanted + ["label"], matrix)
    text = report.table()
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--threshold", default=0.1, show_default=True)
@click.option("--state-dir", default="./state", show_default=True, type=click.Path())
@click.option("--workflow", type=click.Choice(["full", "ait"]), default="full",
              show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--token", default=None, help="require this bearer token on the API")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--recover/--no-recover", default=True, show_default=True,
              help="restore checkpoint and replay the event log on startup")
def serve(model_path, threshold, state_dir, workflow, host, port, token, config_path,
          recover):
    """Run the scoring service."""
    import uvicorn

    from .service import ServiceConfig, TriageService
    from .service.api import create_app

    config = ServiceConfig.load(
        config_path, close_threshold=threshold, state_dir=state_dir,
        workflow=workflow, model_path=model_path, api_token=token,
    )
    model = TriageService.load_model(config.model_path) if config.model_path else None
    if recover:
        service = TriageService.recover(config, state_dir, model=model)
    else:
        service = TriageService(config, model=model, state_dir=state_dir)
    app = create_app(service)
    click.echo(f"serving on http://{host}:{port} (queue depth "
               f"{service.metrics()['queue_depth']})", err=True)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.option("--speed", default=0.0, show_default=True,
              help="replay speed multiplier; 0 = as fast as possible")
@click.option("--token", default=None)
@click.option("--feedback/--no-feedback", default=True, show_default=True,
              help="post recorded resolutions back as analyst actions")
@click.option("--limit", type=int, default=None)
def replay(input_path, url, speed, token, feedback, limit):
    """Drive a running service from a recorded normalized stream."""
    import httpx

    headers = {"Authorization": f"Bearer {token}"} if token else {}
    client = httpx.Client(base_url=url, headers=headers, timeout=30.0)
    pending: list[tuple[float, int, dict]] = []
    counter = 0
    sent = 0
    last_t = None
    wall_start = time.perf_counter()

    def flush_resolutions(up_to: float | None):
        nonlocal counter
        while pending and (up_to is None or pending[0][0] <= up_to):
            _, _, res = heapq.heappop(pending)
            client.post(f"/v1/alerts/{res['alert_id']}/resolution", json=res["body"])

    with open(input_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            t = float(record["created_at"])
            flush_resolutions(t)
            if speed > 0 and last_t is not None and t > last_t:
                time.sleep((t - last_t) / speed)
            last_t = t
            resolution = record.pop("resolution", None)
            response = client.post("/v1/alerts", json=record)
            response.raise_for_status()
            if feedback and resolution is not None:
                counter += 1
                heapq.heappush(pending, (float(resolution["resolved_at"]), counter, {
                    "alert_id": record["id"],
                    "body": {
                        "action": resolution["action"],
                        "label": resolution.get("label"),
                        "resolved_at": resolution["resolved_at"],
                    },
                }))
            sent += 1
            if limit and sent >= limit:
                break
    flush_resolutions(None)
    elapsed = time.perf_counter() - wall_start
    metrics = client.get("/v1/metrics").json()
    click.echo(f"replayed {sent} alerts in {elapsed:.1f}s "
               f"({sent / elapsed * 60:.0f} alerts/min); "
               f"reduction={metrics['alert_reduction']:.3f} "
               f"queue_depth={metrics['queue_depth']}")


if __name__ == "__main__":
    main()
