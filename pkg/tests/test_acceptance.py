"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Criteria that need the real AIT dataset skip with a
reason when it is not on disk (set AIT_DATA_DIR or place files under
./data/ait); the same pipeline is still exercised end to end on a
synthetic stand-in dataset with the identical schema.
"""
from __future__ import annotations

import os
import time
from pathlib import Path

import numpy as np
import pytest

from autotriage.alerts import ActionKind, ResolutionEvent
from autotriage.evaluation import (
    auc_pairwise_oracle,
    compute_metrics,
    discover_files,
    featurize,
    generate_ait_like,
    ingest_ait,
    roc_auc,
    run_experiment,
)
from autotriage.features import ActionCountStore, FeatureAssembler, FeatureConfig
from autotriage.models import (
    GbdtParams,
    LogisticParams,
    TrainingSet,
    attribute,
    predict_matrix,
    serialize,
    train_gbdt,
)
from autotriage.models.artifact import raw_margin
from autotriage.models.logistic import loss_and_gradient
from autotriage.service import ServiceConfig, TriageService

from .helpers import oracle_for, oracle_vector, random_log, replay
from .test_service import T0, alert_record

# Expected metrics for the public AIT dataset: 2-fold time-series CV,
# default boosted-tree parameters, 0.5 threshold, baseline at matched
# alert reduction.
EXPECTED_AIT = {
    "model": {"precision": 0.9945, "recall": 0.9097, "f1": 0.9495,
              "alert_reduction": 0.9545, "fnr": 0.0903},
    "baseline": {"precision": 0.9670, "recall": 0.8755},
}


def _criterion(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


def ait_data_dir() -> Path | None:
    for candidate in (os.environ.get("AIT_DATA_DIR"), "data/ait", "./data/ait"):
        if candidate and Path(candidate).is_dir() and discover_files(candidate):
            return Path(candidate)
    return None


@pytest.fixture(scope="module")
def synth_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance_synth")
    generate_ait_like(out, seed=101, n_tenants=4, days=10.0, n_categories=40,
                      hosts_per_tenant=12, alerts_per_tenant_per_day=260.0)
    return out


class TestFeatureOracleEquivalence:
    def test_hundred_random_logs_match_exactly(self):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        checked = 0
        for i in range(100):
            if i % 20 == 19:
                n_events, probes_n, gap = 2000, 30, 500.0
            elif i % 50 == 37:
                n_events, probes_n, gap = 10_000, 30, 400.0
            else:
                n_events, probes_n, gap = int(rng.integers(80, 700)), 25, 600.0
            config = FeatureConfig.ait() if i % 3 == 0 else FeatureConfig.full()
            log = random_log(
                rng,
                n_events=n_events,
                n_tenants=int(rng.integers(1, 6)),
                n_categories=int(rng.integers(2, 51)),
                mean_gap=gap,
            )
            times = [c.created_at for c in log.creations]
            probe_times = set(rng.choice(times, size=min(probes_n, len(times)),
                                         replace=False))
            _, probes = replay(log, config, probe_times)
            oracle = oracle_for(log, config)
            for record, vec in probes:
                expected = oracle_vector(log, config, record, oracle=oracle)
                np.testing.assert_array_equal(vec, expected)
                checked += 1
        elapsed = time.perf_counter() - start
        _criterion(
            "feature-oracle equivalence",
            elapsed < 60.0,
            f"100 logs, {checked} vectors compared exactly, {elapsed:.1f}s",
        )


class TestNoLookaheadAudit:
    def test_thousand_truncation_probes(self):
        rng = np.random.default_rng(77)
        probes_done = 0
        for log_no in range(20):
            config = FeatureConfig.full() if log_no % 2 else FeatureConfig.ait()
            log = random_log(rng, n_events=400, n_tenants=3, n_categories=10,
                             mean_gap=700.0)
            chosen = rng.choice(len(log.creations), size=50, replace=False)
            probe_records = [log.creations[i] for i in chosen]
            probe_times = {c.created_at for c in probe_records}
            _, probes = replay(log, config, probe_times)
            probed = {p[0].created_at: p for p in probes}
            for record in probe_records:
                _, vec = probed[record.created_at]
                truncated = log.truncated(record.created_at)
                store_tr, _ = replay(truncated, config, set())
                vec_tr = FeatureAssembler(store_tr).assemble_raw(
                    record.created_at, record.tenant, record.category,
                    list(record.entities))
                np.testing.assert_array_equal(vec, vec_tr)
                probes_done += 1
        _criterion("no-lookahead audit", probes_done >= 1000,
                   f"{probes_done} truncation probes, all vectors unchanged")


class TestMetricOracles:
    def test_auc_exact_and_confusion_by_hand(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(10, 501))
            scores = rng.choice(np.round(rng.random(20), 2), size=n)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[: n // 2] = 1 - labels[0]
            assert roc_auc(scores, labels) == auc_pairwise_oracle(scores, labels)
        report = compute_metrics([0.9, 0.8, 0.4, 0.1], [1, 0, 1, 0], 0.5)
        hand = dict(precision=0.5, recall=0.5, accuracy=0.5, alert_reduction=0.5,
                    fnr=0.5)
        ok = all(getattr(report, k) == v for k, v in hand.items())
        _criterion("metric oracles", ok,
                   "50 AUC instances exact; confusion metrics match enumeration")


class TestClassifierSanity:
    def test_all_four_checks(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, size=(200, 1))
        data = TrainingSet(X=x, y=(x[:, 0] >= 0).astype(int),
                           timestamps=np.arange(200.0),
                           alert_ids=[str(i) for i in range(200)])
        sep_auc = roc_auc(predict_matrix(train_gbdt(data, GbdtParams(n_trees=20)),
                                         data.X), data.y)

        cells = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
        X = np.array([c[:2] for c in cells for _ in range(25)], dtype=float)
        y = np.array([c[2] for c in cells for _ in range(25)])
        xor_data = TrainingSet(X=X, y=y, timestamps=np.arange(100.0),
                               alert_ids=[str(i) for i in range(100)])
        xor_model = train_gbdt(xor_data, GbdtParams(n_trees=100, max_depth=2))
        xor_acc = float(np.mean((predict_matrix(xor_model, X) >= 0.5) == y))

        Xg = rng.normal(size=(60, 4))
        yg = (rng.random(60) < 0.5).astype(float)
        max_rel = 0.0
        for _ in range(10):
            w = rng.normal(size=4)
            b = float(rng.normal())
            _, grad_w, _ = loss_and_gradient(Xg, yg, w, b, 1e-3)
            for j in range(4):
                eps = 1e-6
                w_hi, w_lo = w.copy(), w.copy()
                w_hi[j] += eps
                w_lo[j] -= eps
                fd = (loss_and_gradient(Xg, yg, w_hi, b, 1e-3)[0]
                      - loss_and_gradient(Xg, yg, w_lo, b, 1e-3)[0]) / (2 * eps)
                max_rel = max(max_rel, abs(grad_w[j] - fd) / max(1.0, abs(fd)))

        att_ok = True
        rich = rng.normal(size=(300, 6))
        rich_y = (rich[:, 0] * rich[:, 1] + rich[:, 2] > 0).astype(int)
        rich_data = TrainingSet(X=rich, y=rich_y, timestamps=np.arange(300.0),
                                alert_ids=[str(i) for i in range(300)])
        model = train_gbdt(rich_data, GbdtParams(n_trees=40))
        for i in range(40):
            att = attribute(model, rich[i])
            if abs(att.base_value + att.contributions.sum()
                   - raw_margin(model, rich[i])) >= 1e-9:
                att_ok = False
        ok = sep_auc == 1.0 and xor_acc == 1.0 and max_rel < 1e-6 and att_ok
        _criterion(
            "classifier sanity", ok,
            f"separable auc={sep_auc}, xor acc={xor_acc}, "
            f"max grad rel err={max_rel:.2e}, attribution complete to 1e-9",
        )


def _build_service(tmp_path: Path, model, threshold: float,
                   budget_floor: int = 10) -> TriageService:
    config = ServiceConfig(close_threshold=threshold,
                           sample_budget_floor=budget_floor,
                           state_dir=str(tmp_path / "state"))
    return TriageService(config, model=model, state_dir=config.state_dir)


def _train_small_full_model(seed: int = 3):
    """A real GBDT over the 29-slot layout, trained on a quick synthetic
    history where alerts with entities get investigated."""
    rng = np.random.default_rng(seed)
    store = ActionCountStore(FeatureConfig.full(), validate=False)
    assembler = FeatureAssembler(store)
    rows, labels = [], []
    t = T0
    categories = [f"cat-{i}" for i in range(12)]
    invest_prob = rng.uniform(0.05, 0.95, size=len(categories))
    for i in range(4000):
        t += float(rng.exponential(40.0))
        ci = int(rng.integers(len(categories)))
        entities = tuple(f"e{int(rng.integers(40))}" for _ in range(int(rng.integers(0, 3))))
        vec = assembler.assemble_raw(t, "t0", categories[ci], list(entities))
        vec[-4:] = [len(entities), 0.0, float(rng.integers(0, 15)), 1.0]
        investigated = rng.random() < invest_prob[ci]
        rows.append(vec)
        labels.append(int(investigated))
        store.record_created_raw(t, "t0", categories[ci], entities)
        store.record_resolution_raw(t, t + 60.0, "t0", categories[ci], entities,
                                    investigated, investigated)
    data = TrainingSet(X=np.asarray(rows), y=np.asarray(labels),
                       timestamps=np.arange(float(len(rows))),
                       alert_ids=[str(i) for i in range(len(rows))])
    return train_gbdt(data, GbdtParams(n_trees=30))


class TestServiceThroughput:
    def test_replay_100k_alerts_against_million_event_store(self, tmp_path):
        model = _train_small_full_model()
        service = _build_service(tmp_path, model, threshold=0.25)

        # 1M-event store: 500k creations + 500k resolutions, bulk-seeded
        rng = np.random.default_rng(11)
        categories = [f"cat-{i}" for i in range(12)]
        t = T0 - 40 * 86400.0
        seed_start = time.perf_counter()
        store = service.store
        for i in range(500_000):
            t += 6.0
            cat = categories[i % 12]
            entity = (f"e{i % 200}",)
            store.record_created_raw(t, "t0", cat, entity)
            store.record_resolution_raw(t, t + 120.0, "t0", cat, entity,
                                        i % 3 == 0, i % 3 == 0)
        seed_elapsed = time.perf_counter() - seed_start

        n = 100_000
        cat_choices = rng.integers(0, 12, size=n)
        ent_choices = rng.integers(0, 200, size=n)
        has_entity = rng.random(n) < 0.5
        base = t + 10.0
        start = time.perf_counter()
        for i in range(n):
            record = {
                "id": f"r-{i}",
                "tenant_id": "t0",
                "created_at": base + i * 0.05,
                "title": "x",
                "category": categories[cat_choices[i]],
                "entities": ([{"identifier": f"e{ent_choices[i]}"}]
                             if has_entity[i] else []),
            }
            service.score_record(record)
        elapsed = time.perf_counter() - start
        per_minute = n / elapsed * 60.0
        p95 = service.latency_percentiles()["p95_ms"]
        _criterion(
            "service throughput",
            per_minute >= 300.0 and p95 < 50.0,
            f"{per_minute:,.0f} alerts/min (store seed {seed_elapsed:.0f}s), "
            f"p95={p95:.2f}ms at {1_000_000:,}-event store",
        )
        assert service.scored_total == n

    def test_sampled_fnr_estimator_within_two_points(self, tmp_path):
        from .test_service import entity_count_model

        model = entity_count_model()
        config = ServiceConfig(close_threshold=0.2, sample_budget_floor=250,
                               sample_budget_fraction=0.0,
                               state_dir=str(tmp_path / "state"))
        service = TriageService(config, model=model, state_dir=config.state_dir)
        rng = np.random.default_rng(21)
        categories = [f"c{i}" for i in range(8)]
        true_rate = {c: float(r) for c, r in
                     zip(categories, rng.uniform(0.01, 0.35, size=8))}
        closed_truth = []  # ground-truth labels of would-be-closed alerts
        t = T0
        n_days, per_day = 9, 5000
        for day in range(n_days):
            for i in range(per_day):
                t += 86400.0 / per_day
                cat = categories[int(rng.integers(8))]
                is_pos = bool(rng.random() < true_rate[cat])
                # no entities -> the model scores low -> closable stratum
                disposition = service.score_record({
                    "id": f"d{day}-{i}", "tenant_id": "t0", "created_at": t,
                    "title": "x", "category": cat, "entities": [],
                })
                closed_truth.append(is_pos)
                if disposition.disposition == "queued":
                    service.ingest_feedback(ResolutionEvent(
                        alert_id=f"d{day}-{i}",
                        action=(ActionKind.INVESTIGATED if is_pos
                                else ActionKind.NOT_INVESTIGATED),
                        resolved_at=t + 30.0,
                    ))
        sampled = service.sampled_total
        estimate = service.sampler.fnr_estimate()
        truth = float(np.mean(closed_truth))
        ok = sampled >= 2000 and estimate is not None and abs(estimate - truth) <= 0.02
        _criterion(
            "sampled-FNR estimator",
            ok,
            f"estimate={estimate:.4f} truth={truth:.4f} "
            f"(|err|={abs(estimate - truth):.4f}, {sampled} samples)",
        )


class TestFeedbackLoopExclusion:
    def test_no_auto_closed_alerts_in_training_set(self, tmp_path):
        model = _train_small_full_model(seed=5)
        service = _build_service(tmp_path, model, threshold=0.3, budget_floor=15)
        rng = np.random.default_rng(9)
        categories = [f"cat-{i}" for i in range(12)]
        auto_closed_ids = set()
        t = T0
        for i in range(6000):
            t += float(rng.exponential(30.0))
            cat = categories[int(rng.integers(12))]
            entities = ([{"identifier": f"e{int(rng.integers(60))}"}]
                        if rng.random() < 0.5 else [])
            disposition = service.score_record({
                "id": f"s-{i}", "tenant_id": "t0", "created_at": t, "title": "x",
                "category": cat, "entities": entities,
            })
            if disposition.disposition == "auto_closed":
                auto_closed_ids.add(f"s-{i}")
            elif disposition.disposition == "queued" and rng.random() < 0.7:
                investigated = rng.random() < 0.4
                service.ingest_feedback(ResolutionEvent(
                    alert_id=f"s-{i}",
                    action=(ActionKind.INVESTIGATED if investigated
                            else ActionKind.NOT_INVESTIGATED),
                    resolved_at=t + float(rng.uniform(30, 600)),
                ))
        assert auto_closed_ids, "replay produced no auto-closures"
        data = service.training_set()
        overlap = auto_closed_ids.intersection(data.alert_ids)
        _criterion(
            "feedback-loop exclusion",
            len(overlap) == 0,
            f"{len(auto_closed_ids)} auto-closed, {len(data)} training rows, "
            f"overlap={len(overlap)}",
        )


class TestDeterminism:
    def test_two_seeded_runs_byte_identical(self, synth_dataset, tmp_path):
        import io

        from autotriage.features.vector import write_feature_dump

        data_dir = ait_data_dir()
        source = data_dir if data_dir else synth_dataset
        note = "real AIT data" if data_dir else "synthetic stand-in (AIT schema)"
        artifacts = []
        for _ in range(2):
            stream, _ = ingest_ait(discover_files(source), jitter_seed=3)
            if len(stream) > 60_000:
                stream = stream.subsample_per_tenant(0.02, seed=1)
            result = run_experiment(stream, FeatureConfig.ait(), k=2, seed=3)
            buf = io.StringIO()
            table = result.table
            write_feature_dump(buf, table.names, table.ids, table.tenants,
                               table.timestamps, table.labels, table.X)
            artifacts.append((buf.getvalue(), tuple(result.artifacts),
                              result.metrics_table()))
        ok = artifacts[0] == artifacts[1]
        _criterion("determinism", ok,
                   f"two seeded runs byte-identical on {note} "
                   f"(dump, model artifacts, metrics table)")


@pytest.mark.skipif(ait_data_dir() is None,
                    reason="AIT dataset not on disk (set AIT_DATA_DIR); "
                           "environment has no network access to fetch it")
class TestAitReproduction:
    def test_full_dataset_two_fold(self):
        stream, stats = ingest_ait(discover_files(ait_data_dir()), jitter_seed=0)
        assert stats.total == 2_655_821, f"expected the full dataset, got {stats.total}"
        assert stats.categories == 93
        result = run_experiment(stream, FeatureConfig.ait(), k=2, seed=0)
        avg, base = result.model_average, result.baseline_average
        checks = {
            f"model {k}": abs(avg[k] - v) <= 0.05 for k, v in EXPECTED_AIT["model"].items()
        }
        checks.update({
            f"baseline {k}": abs(base[k] - v) <= 0.05
            for k, v in EXPECTED_AIT["baseline"].items()
        })
        detail = "; ".join(f"{k}={'ok' if ok else 'OUT'}" for k, ok in checks.items())
        _criterion("AIT reproduction (full, +/-5pp)", all(checks.values()),
                   detail + f" | model={avg} baseline={base}")

    def test_subsample_smoke_run(self):
        start = time.perf_counter()
        stream, _ = ingest_ait(discover_files(ait_data_dir()), jitter_seed=0)
        stream = stream.subsample_per_tenant(0.10, seed=0)
        result = run_experiment(stream, FeatureConfig.ait(), k=2, seed=0)
        elapsed = time.perf_counter() - start
        avg = result.model_average
        checks = {k: abs(avg[k] - v) <= 0.10 for k, v in EXPECTED_AIT["model"].items()}
        _criterion("AIT smoke run (10%, +/-10pp, <=5min)",
                   all(checks.values()) and elapsed <= 300.0,
                   f"{elapsed:.0f}s; " + "; ".join(
                       f"{k}={avg[k]:.4f}" for k in checks))

    def test_baseline_dominance_at_matched_reduction(self):
        stream, _ = ingest_ait(discover_files(ait_data_dir()), jitter_seed=0)
        result = run_experiment(stream, FeatureConfig.ait(), k=2, seed=0)
        model_fnr = result.model_average["fnr"]
        baseline_fnr = result.baseline_average["fnr"]
        _criterion("baseline dominance (AIT)", model_fnr <= baseline_fnr,
                   f"model fnr={model_fnr:.4f} <= baseline fnr={baseline_fnr:.4f} "
                   f"at matched reduction")


class TestBaselineDominanceSynthetic:
    def test_direction_holds_on_synthetic_stream(self, synth_dataset):
        stream, _ = ingest_ait(discover_files(synth_dataset), jitter_seed=1)
        result = run_experiment(stream, FeatureConfig.ait(), k=2, seed=1)
        model_fnr = result.model_average["fnr"]
        baseline_fnr = result.baseline_average["fnr"]
        _criterion(
            "baseline dominance (synthetic stand-in)",
            model_fnr <= baseline_fnr,
            f"model fnr={model_fnr:.4f} <= baseline fnr={baseline_fnr:.4f} "
            f"at matched reduction",
        )
