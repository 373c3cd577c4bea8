"""Acceptance checks, one test per numbered criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get a one-line verdict
per criterion.  The three simulation-trend criteria share the module-wide
extractor stage cache, so the whole file stays well inside the runtime
targets on a laptop CPU.
"""

import json
import time
from dataclasses import replace
from fractions import Fraction
from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

from fpcil.bridge import (
    build_prompt_specs,
    default_catalog,
    emit_manifest,
    ingest_embedding_file,
    parse_manifest,
    write_embedding_file,
)
from fpcil.extractor import TrainConfig, init_extractor, init_linear_head, loss_and_grads
from fpcil.future import (
    LEVEL_FULL,
    LEVEL_R1,
    LEVEL_R2,
    FixtureReplayer,
    overlap,
    parse_transcript,
    predict_future,
    tally_transcripts,
)
from fpcil.heads import (
    FECAM,
    NCM,
    ClassPrototype,
    FeCamClassStats,
    HeadConfig,
    fecam_predict_batch,
    fetril_pseudo_features,
    ncm_predict_batch,
)
from fpcil.protocol import ClassCatalog, StepAccuracy, average_incremental_accuracy, build_schedule
from fpcil.rng import stream
from fpcil.runner import (
    ExtractorSpec,
    SamplingSpec,
    ScenarioConfig,
    ScheduleSpec,
    StepDataGate,
    aux_sweep_matrix,
    clear_stage_cache,
    head_comparison_matrix,
    reference_scenario,
    run_fpcil_scenario,
    run_matrix,
    run_with_artifacts,
    sample_count_matrix,
    write_report,
)
from fpcil.samples import EmbeddingSample
from fpcil.world import AUX_ORACLE, AuxiliarySpec, GapParams, WorldConfig

from oracles import (
    fd_gradients,
    max_relative_error,
    nearest_mean_brute_force,
    relu_preactivation_margin,
)

FIXTURE_DIR = Path(str(files("fpcil.assets"))) / "fixtures" / "gpt_b0inc10"
REFERENCE_SEEDS = tuple(range(10))


def small_scenario(**overrides):
    base = dict(
        world=WorldConfig(num_classes=10, dim=6, separation=5.0, intra_sd=1.0, seed=3),
        schedule=ScheduleSpec(base_size=0, inc_size=5, order_seed=0),
        auxiliary=AuxiliarySpec(mode=AUX_ORACLE, n_per_class=8, gap=GapParams(2.0, 1.5)),
        extractor=ExtractorSpec(layer_dims=(6, 8, 5), train=TrainConfig(epochs=2, batch_size=32)),
        head=HeadConfig(kind=NCM),
        sampling=SamplingSpec(train_per_class=6, test_per_class=5, distractor_classes=10),
        eval_seeds=(0,),
    )
    base.update(overrides)
    return ScenarioConfig(**base)


@pytest.fixture(scope="module")
def reference_config():
    return reference_scenario(eval_seeds=REFERENCE_SEEDS)


@pytest.fixture(scope="module")
def aux_sweep(reference_config):
    started = time.perf_counter()
    result = run_matrix(aux_sweep_matrix(reference_config))
    return result, time.perf_counter() - started


@pytest.fixture(scope="module")
def sample_counts(reference_config):
    return run_matrix(sample_count_matrix(reference_config))


@pytest.fixture(scope="module")
def head_comparison(reference_config):
    return run_matrix(head_comparison_matrix(reference_config))


def test_criterion_01_gradient_oracle():
    """Analytic gradients match central differences on 100 random instances."""
    gen = stream(20240915, "grad-oracle")
    started = time.perf_counter()
    worst = 0.0
    for i in range(100):
        n_transitions = int(gen.integers(1, 4))
        dims = tuple(int(gen.integers(2, 9)) for _ in range(n_transitions + 1))
        n_classes = int(gen.integers(2, 6))
        batch = int(gen.integers(2, 9))
        wd = float(gen.choice([0.0, 0.01, 0.1]))
        ext = init_extractor(dims, init_seed=1000 + i)
        head = init_linear_head(range(n_classes), dims[-1], init_seed=2000 + i)
        # central differences need a point away from the rectifier kinks
        for _ in range(100):
            X = gen.normal(size=(batch, dims[0]))
            if relu_preactivation_margin(ext.weights, ext.biases, X) > 1e-3:
                break
        y = gen.integers(0, n_classes, size=batch)
        _, (dWs, dbs, dhW, dhb) = loss_and_grads(ext, head, (X, y), weight_decay=wd)
        params = [*ext.weights, *ext.biases, head.matrix, head.bias]
        numeric = fd_gradients(
            lambda: loss_and_grads(ext, head, (X, y), weight_decay=wd)[0], params
        )
        worst = max(worst, max_relative_error([*dWs, *dbs, dhW, dhb], numeric))
    elapsed = time.perf_counter() - started
    assert worst < 1e-4, f"max relative error {worst:.3e}"
    assert elapsed < 5.0, f"gradient oracle took {elapsed:.2f}s"


def test_criterion_02_head_oracle_equivalence():
    """NCM equals exhaustive search; identity-covariance FeCAM equals NCM."""
    gen = stream(20240916, "head-oracle")
    protos = [
        ClassPrototype(class_id=cid, mean_feature=gen.normal(size=16), count=5)
        for cid in range(10)
    ]
    X = gen.normal(size=(100, 16)) * 2.0
    got = ncm_predict_batch(protos, X)
    want = nearest_mean_brute_force(X, {p.class_id: p.mean_feature for p in protos})
    assert np.array_equal(got, want)

    stats = [
        FeCamClassStats(p.class_id, p.mean_feature, np.eye(16), 1.0, 1.0, 1.0)
        for p in protos
    ]
    Y = gen.normal(size=(1000, 16)) * 3.0
    assert np.array_equal(fecam_predict_batch(stats, Y), ncm_predict_batch(protos, Y))


def test_criterion_03_translation_identity():
    """Pseudo-feature batches center exactly on the target prototype."""
    gen = stream(20240917, "translation")
    for _ in range(50):
        n = int(gen.integers(2, 128))
        d = int(gen.integers(1, 64))
        F = gen.normal(size=(n, d)) * float(gen.uniform(0.5, 8.0))
        target = gen.normal(size=d) * 10.0
        pseudo = fetril_pseudo_features(F, F.mean(axis=0), target)
        assert np.max(np.abs(pseudo.mean(axis=0) - target)) < 1e-9


def test_criterion_04_metric_exactness():
    """The incremental average is exact rational arithmetic."""
    steps = (
        StepAccuracy(1, frozenset({0}), correct=8, total=10),
        StepAccuracy(2, frozenset({0, 1}), correct=6, total=10),
    )
    assert average_incremental_accuracy(steps) == 0.7

    single = (StepAccuracy(1, frozenset({0}), correct=7, total=9),)
    assert average_incremental_accuracy(single) == single[0].top1


def test_criterion_05_protocol_invariants():
    """Schedules partition the catalog; the frozen stage stays frozen."""
    gen = stream(20240918, "schedules")
    for _ in range(20):
        total = int(gen.choice([20, 40, 50, 60, 100]))
        base = int(gen.choice([0, total // 2]))
        remaining = total - base
        divisors = [d for d in range(1, remaining + 1) if remaining % d == 0]
        inc = int(divisors[int(gen.integers(0, len(divisors)))])
        schedule = build_schedule(
            ClassCatalog.generic(total), base, inc, int(gen.integers(0, 10_000))
        )
        union: set[int] = set()
        for t in range(1, schedule.num_steps + 1):
            step = schedule.step_classes(t)
            assert not union & step, "steps must be disjoint"
            union |= step
        assert union == set(range(total)), "steps must cover the catalog"
        assert len(schedule.step_classes(1)) == (base or inc)

    _, artifacts = run_with_artifacts(small_scenario(), seed=0)
    initial = artifacts.schedule.step_classes(1)
    assert artifacts.restricted_head.matrix.shape[0] == len(initial)
    assert set(artifacts.restricted_head.class_ids) == initial

    gate = StepDataGate({1: [EmbeddingSample(np.zeros(2), 0)], 2: []})
    gate.advance()
    with pytest.raises(Exception) as excinfo:
        gate.training_samples(1)
    from fpcil.errors import ProtocolViolationError

    assert isinstance(excinfo.value, ProtocolViolationError)

    assert len(set(artifacts.digest_per_step)) == 1
    assert artifacts.digest_per_step[0] == artifacts.digest_at_freeze


def test_criterion_06_auxiliary_quality_trend(aux_sweep):
    """Better future-class prediction monotonically lifts the average accuracy."""
    result, elapsed = aux_sweep
    mean = {r.label: 100.0 * r.aia_mean for r in result.rows}
    # partial-100 selects every future class, which is the oracle treatment
    oracle = mean["partial-100"]
    assert oracle - mean["partial-50"] >= 1.0, (
        f"oracle {oracle:.2f} vs partial-50 {mean['partial-50']:.2f}"
    )
    assert mean["partial-50"] - mean["none"] >= 1.0, (
        f"partial-50 {mean['partial-50']:.2f} vs none {mean['none']:.2f}"
    )

    k_values = [0, 33, 50, 66, 100]
    aias = [mean[f"partial-{k}"] for k in k_values]
    rho, _ = spearmanr(k_values, aias)
    assert rho > 0, f"Spearman correlation {rho} not positive over {aias}"

    assert elapsed < 600.0, f"auxiliary sweep took {elapsed:.1f}s"


def test_criterion_07_sample_count_trend(sample_counts):
    """More synthetic samples per auxiliary class helps by >= 1 point."""
    gain = sample_counts.row("n-500").improvement_pp
    assert gain is not None
    assert gain >= 1.0, f"n-500 improves on n-50 by only {gain:.2f} p.p."


def test_criterion_08_head_matrix_improvements(head_comparison):
    """Every head shows a positive oracle-over-baseline improvement row."""
    labels = [r.label for r in head_comparison.rows]
    assert labels == [
        "ncm/baseline",
        "ncm/oracle",
        "fetril/baseline",
        "fetril/oracle",
        "fecam/baseline",
        "fecam/oracle",
    ]
    for kind in ("ncm", "fetril", "fecam"):
        baseline = head_comparison.row(f"{kind}/baseline")
        treated = head_comparison.row(f"{kind}/oracle")
        assert baseline.improvement_pp is None
        assert treated.baseline == f"{kind}/baseline"
        assert treated.n_seeds == len(REFERENCE_SEEDS)
        assert treated.improvement_pp > 0.0, (
            f"{kind}: oracle {100 * treated.aia_mean:.2f} did not beat "
            f"baseline {100 * baseline.aia_mean:.2f}"
        )


def test_criterion_09_prediction_fixture_tallies():
    """Transcript parsing reproduces the golden tally and hit rates."""
    golden = json.loads((FIXTURE_DIR / "golden_tally.json").read_text())
    texts = [p.read_text() for p in sorted(FIXTURE_DIR.glob("*.txt"))]
    tally = tally_transcripts([parse_transcript(t) for t in texts])
    assert tally.counts == golden["counts"]
    assert tally.repeats == golden["repeats"]

    exp = json.loads((FIXTURE_DIR / "experiment.json").read_text())
    prediction = predict_future(FixtureReplayer(FIXTURE_DIR), exp["initial_names"])
    full = set(prediction.selected(LEVEL_FULL))
    r1 = set(prediction.selected(LEVEL_R1))
    r2 = set(prediction.selected(LEVEL_R2))
    assert r2 <= r1 <= full

    assert len(full) == 150
    hits, frac = overlap(full, exp["future_names"])
    assert (hits, frac) == (53, Fraction(53, 90))
    assert f"{100 * float(frac):.1f}" == "58.9"


def test_criterion_10_format_round_trips(tmp_path):
    """Containers, manifests and reports serialize reproducibly."""
    gen = stream(20240919, "round-trip")
    samples = [
        EmbeddingSample(gen.normal(size=12), int(gen.integers(0, 5)))
        for _ in range(40)
    ]
    data_a, meta_a = tmp_path / "a.fpeb", tmp_path / "a.jsonl"
    write_embedding_file(samples, data_a, meta_a)
    loaded = ingest_embedding_file(data_a, meta_a)
    data_b, meta_b = tmp_path / "b.fpeb", tmp_path / "b.jsonl"
    write_embedding_file(loaded, data_b, meta_b)
    assert data_a.read_bytes() == data_b.read_bytes()
    assert meta_a.read_bytes() == meta_b.read_bytes()

    specs = build_prompt_specs(default_catalog(), range(10, 40), n_samples=500, base_seed=3)
    manifest = tmp_path / "gen.jsonl"
    emit_manifest(specs, manifest)
    assert parse_manifest(manifest) == specs

    config = small_scenario()
    first = run_fpcil_scenario(config, seed=0)
    clear_stage_cache()
    second = run_fpcil_scenario(config, seed=0)
    write_report(first, tmp_path / "r1")
    write_report(second, tmp_path / "r2")
    assert (tmp_path / "r1" / "report.json").read_bytes() == (
        tmp_path / "r2" / "report.json"
    ).read_bytes()
    assert (tmp_path / "r1" / "per_step.csv").read_bytes() == (
        tmp_path / "r2" / "per_step.csv"
    ).read_bytes()
