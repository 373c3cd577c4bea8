"""End-to-end scenario engine and experiment matrices.

One scenario run: build the world and schedule, compose the auxiliary class
set, sample the initial step's real data plus synthetic auxiliary data,
train extractor and joint head, freeze the extractor and drop non-initial
classifier rows, then walk the incremental steps updating only the chosen
head and evaluating on all seen classes after every step.

Training data flows through a gate that permanently revokes a step's
samples once the next step begins, which makes the exemplar-free constraint
an enforced property rather than a convention.

A matrix runs several scenarios that share world, schedule and seeds, so
row differences isolate the treatment (auxiliary mode, head, sample count),
and reports per-scenario mean +- sd with improvements in percentage points.
"""

from __future__ import annotations

import csv
import hashlib
import json
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    ConfigurationError,
    DataFormatError,
    MatrixError,
    ProtocolViolationError,
    StepDataRevokedError,
)
from .extractor import (
    LinearHeadWeights,
    MlpExtractor,
    TrainConfig,
    embed_batch,
    finalize_initial_step,
    freeze_extractor,
    init_extractor,
    init_linear_head,
    train_initial,
)
from .heads import FETRIL, HeadConfig, HeadState, empty_head, predict_fn, update_head
from .protocol import (
    ClassCatalog,
    IncrementalSchedule,
    RunReport,
    StepAccuracy,
    average_incremental_accuracy,
    build_schedule,
    evaluate_seen,
)
from .samples import REAL, SYNTHETIC, TEST, TRAIN, EmbeddingSample, by_class, stack
from .world import (
    AUX_NONE,
    AUX_ORACLE,
    AUX_PARTIAL,
    AuxiliarySpec,
    GapParams,
    WorldConfig,
    build_world,
    compose_auxiliary,
    sample_class,
)

COMP_DEFAULT = "real+synthetic"
COMP_VAR1 = "synthetic-only-future"
COMP_VAR2 = "all-synthetic"
COMPOSITIONS = (COMP_DEFAULT, COMP_VAR1, COMP_VAR2)


@dataclass(frozen=True)
class ScheduleSpec:
    base_size: int = 0
    inc_size: int = 10
    order_seed: int = 0


@dataclass(frozen=True)
class SamplingSpec:
    """Per-class sample counts and the size of the distractor class pool."""

    train_per_class: int = 40
    test_per_class: int = 50
    distractor_classes: int = 100

    def __post_init__(self):
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise ConfigurationError("train_per_class and test_per_class must be >= 1")
        if self.distractor_classes < 0:
            raise ConfigurationError("distractor_classes must be >= 0")


@dataclass(frozen=True)
class ExtractorSpec:
    layer_dims: tuple[int, ...] = (64, 96, 48)
    train: TrainConfig = field(default_factory=lambda: TrainConfig(epochs=10))

    def __post_init__(self):
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))


@dataclass(frozen=True)
class ScenarioConfig:
    world: WorldConfig
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    auxiliary: AuxiliarySpec = field(default_factory=AuxiliarySpec)
    composition: str = COMP_DEFAULT
    extractor: ExtractorSpec = field(default_factory=ExtractorSpec)
    head: HeadConfig = field(default_factory=HeadConfig)
    sampling: SamplingSpec = field(default_factory=SamplingSpec)
    eval_seeds: tuple[int, ...] = (0,)
    output_dir: str = "runs"

    def __post_init__(self):
        object.__setattr__(self, "eval_seeds", tuple(int(s) for s in self.eval_seeds))
        if self.composition not in COMPOSITIONS:
            raise ConfigurationError(
                f"unknown composition {self.composition!r}, expected one of {COMPOSITIONS}"
            )
        if not self.eval_seeds:
            raise ConfigurationError("eval_seeds must not be empty")
        if self.extractor.layer_dims[0] != self.world.dim:
            raise ConfigurationError(
                f"extractor input dim {self.extractor.layer_dims[0]} "
                f"does not match world dim {self.world.dim}"
            )

    def to_dict(self) -> dict:
        return {
            "world": {
                "num_classes": self.world.num_classes,
                "dim": self.world.dim,
                "separation": self.world.separation,
                "intra_sd": self.world.intra_sd,
                "seed": self.world.seed,
            },
            "schedule": {
                "base_size": self.schedule.base_size,
                "inc_size": self.schedule.inc_size,
                "order_seed": self.schedule.order_seed,
            },
            "auxiliary": {
                "mode": self.auxiliary.mode,
                "k_percent": self.auxiliary.k_percent,
                "explicit_classes": sorted(self.auxiliary.explicit_classes),
                "n_per_class": self.auxiliary.n_per_class,
                "gap": {
                    "delta": self.auxiliary.gap.delta,
                    "diversity_scale": self.auxiliary.gap.diversity_scale,
                },
                "distractor_pool": sorted(self.auxiliary.distractor_pool),
            },
            "composition": self.composition,
            "extractor": {
                "layer_dims": list(self.extractor.layer_dims),
                "train": {
                    "epochs": self.extractor.train.epochs,
                    "batch_size": self.extractor.train.batch_size,
                    "lr_init": self.extractor.train.lr_init,
                    "weight_decay": self.extractor.train.weight_decay,
                    "momentum": self.extractor.train.momentum,
                    "augment_noise_sd": self.extractor.train.augment_noise_sd,
                },
            },
            "head": {
                "kind": self.head.kind,
                "fecam_lambda": self.head.fecam_lambda,
                "fecam_gamma1": self.head.fecam_gamma1,
                "fecam_gamma2": self.head.fecam_gamma2,
                "fecam_shared_cov": self.head.fecam_shared_cov,
                "retrain_epochs": self.head.retrain_epochs,
                "retrain_lr": self.head.retrain_lr,
                "retrain_batch_size": self.head.retrain_batch_size,
            },
            "sampling": {
                "train_per_class": self.sampling.train_per_class,
                "test_per_class": self.sampling.test_per_class,
                "distractor_classes": self.sampling.distractor_classes,
            },
            "eval_seeds": list(self.eval_seeds),
        }

    def digest(self) -> str:
        """Content hash of the canonical config (output_dir excluded)."""
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()

    @staticmethod
    def from_dict(d: dict) -> "ScenarioConfig":
        aux = d.get("auxiliary", {})
        gap = aux.get("gap", {})
        ext = d.get("extractor", {})
        train = ext.get("train", {})
        return ScenarioConfig(
            world=WorldConfig(**d["world"]),
            schedule=ScheduleSpec(**d.get("schedule", {})),
            auxiliary=AuxiliarySpec(
                mode=aux.get("mode", AUX_NONE),
                k_percent=aux.get("k_percent", 100.0),
                explicit_classes=frozenset(aux.get("explicit_classes", ())),
                n_per_class=aux.get("n_per_class", 0),
                gap=GapParams(
                    delta=gap.get("delta", 0.0),
                    diversity_scale=gap.get("diversity_scale", 1.0),
                ),
                distractor_pool=frozenset(aux.get("distractor_pool", ())),
            ),
            composition=d.get("composition", COMP_DEFAULT),
            extractor=ExtractorSpec(
                layer_dims=tuple(ext.get("layer_dims", (64, 96, 48))),
                train=TrainConfig(
                    epochs=train.get("epochs", 10),
                    batch_size=train.get("batch_size", 128),
                    lr_init=train.get("lr_init", 0.1),
                    weight_decay=train.get("weight_decay", 5e-4),
                    momentum=train.get("momentum", 0.9),
                    augment_noise_sd=train.get("augment_noise_sd", 0.0),
                ),
            ),
            head=HeadConfig(**d.get("head", {})),
            sampling=SamplingSpec(**d.get("sampling", {})),
            eval_seeds=tuple(d.get("eval_seeds", (0,))),
            output_dir=d.get("output_dir", "runs"),
        )


class StepDataGate:
    """Hands out each step's training samples exactly during that step.

    Once the run advances past step t, step t's samples are dropped for
    good; later requests raise the revocation error.  Requests for steps
    that have not started yet are refused too.
    """

    def __init__(self, per_step: dict[int, list[EmbeddingSample]]):
        self._data = {int(t): list(s) for t, s in per_step.items()}
        self._current = 1

    @property
    def current_step(self) -> int:
        return self._current

    def training_samples(self, step_index: int) -> list[EmbeddingSample]:
        if step_index < self._current:
            raise StepDataRevokedError(
                f"training data of step {step_index} was revoked when step "
                f"{step_index + 1} began (now at step {self._current})"
            )
        if step_index > self._current:
            raise ProtocolViolationError(
                f"step {step_index} has not started yet (now at step {self._current})"
            )
        return self._data[step_index]

    def advance(self) -> None:
        self._data.pop(self._current, None)
        self._current += 1


@dataclass
class RunArtifacts:
    """Inspectable internals of one run, for tests and demos."""

    schedule: IncrementalSchedule
    auxiliary_classes: frozenset[int]
    extractor: MlpExtractor
    restricted_head: LinearHeadWeights | None
    head_state: HeadState
    digest_at_freeze: str
    digest_per_step: tuple[str, ...]
    epoch_losses: tuple[float, ...]


@dataclass(frozen=True)
class _TrainedStage:
    extractor: MlpExtractor
    restricted_head: LinearHeadWeights | None
    digest: str
    epoch_losses: tuple[float, ...]


# Keyed by (training-relevant config digest, seed).  Entries are frozen
# extractors, so sharing them across scenarios that differ only in the head
# cannot leak state between runs.
_stage_cache: dict[tuple[str, int], _TrainedStage] = {}


def clear_stage_cache() -> None:
    _stage_cache.clear()


def _effective_auxiliary(config: ScenarioConfig) -> AuxiliarySpec:
    aux = config.auxiliary
    if aux.mode == AUX_PARTIAL and not aux.distractor_pool:
        first = config.world.num_classes
        pool = frozenset(range(first, first + config.sampling.distractor_classes))
        aux = replace(aux, distractor_pool=pool)
    return aux


def _world_models(config: ScenarioConfig):
    """Target-class models plus distractor models beyond the catalog.

    The block draw guarantees the first num_classes models are identical
    whether or not distractors are appended, so scenarios with different
    pool sizes still share the same target world.
    """
    extended = WorldConfig(
        num_classes=config.world.num_classes + config.sampling.distractor_classes,
        dim=config.world.dim,
        separation=config.world.separation,
        intra_sd=config.world.intra_sd,
        seed=config.world.seed,
    )
    return {m.class_id: m for m in build_world(extended)}


def _training_key(config: ScenarioConfig, seed: int) -> tuple[str, int]:
    d = config.to_dict()
    del d["head"]
    del d["eval_seeds"]
    del d["sampling"]["test_per_class"]
    canonical = json.dumps(d, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest(), seed


def _train_stage(config, seed, schedule, aux_set, models) -> _TrainedStage:
    key = _training_key(config, seed)
    if key in _stage_cache:
        return _stage_cache[key]

    initial = sorted(schedule.step_classes(1))
    aux = _effective_auxiliary(config)
    if aux_set and aux.n_per_class < 1:
        raise ConfigurationError("auxiliary classes requested but n_per_class < 1")

    train_set: list[EmbeddingSample] = []
    if config.composition == COMP_DEFAULT:
        for cid in initial:
            train_set.extend(
                sample_class(models[cid], config.sampling.train_per_class, REAL, aux.gap, seed)
            )
    elif config.composition == COMP_VAR2:
        if aux.n_per_class < 1:
            raise ConfigurationError("all-synthetic composition needs n_per_class >= 1")
        for cid in initial:
            train_set.extend(sample_class(models[cid], aux.n_per_class, SYNTHETIC, aux.gap, seed))
    elif not aux_set:
        raise ConfigurationError("synthetic-only-future composition needs auxiliary classes")
    for cid in sorted(aux_set):
        train_set.extend(sample_class(models[cid], aux.n_per_class, SYNTHETIC, aux.gap, seed))

    joint_ids = sorted({s.class_id for s in train_set})
    extractor = init_extractor(config.extractor.layer_dims, init_seed=seed)
    joint_head = init_linear_head(joint_ids, extractor.feature_dim, init_seed=seed)
    train_cfg = replace(config.extractor.train, shuffle_seed=seed)
    result = train_initial(extractor, joint_head, train_set, train_cfg)

    if config.composition == COMP_VAR1:
        # the joint head covers only auxiliary classes; nothing to keep
        frozen = freeze_extractor(result.extractor)
        restricted = None
    else:
        frozen, restricted = finalize_initial_step(result.extractor, result.head, initial)
    stage = _TrainedStage(
        extractor=frozen,
        restricted_head=restricted,
        digest=frozen.weight_digest(),
        epoch_losses=tuple(result.epoch_losses),
    )
    _stage_cache[key] = stage
    return stage


def _embed_samples(extractor, samples):
    X, _ = stack(samples)
    F = embed_batch(extractor, X)
    return [
        EmbeddingSample(F[i], s.class_id, origin=s.origin, split=s.split)
        for i, s in enumerate(samples)
    ]


def run_with_artifacts(config: ScenarioConfig, seed: int | None = None) -> tuple[RunReport, RunArtifacts]:
    """One full incremental run for one seed; see module docstring."""
    if seed is None:
        seed = config.eval_seeds[0]
    catalog = ClassCatalog.generic(config.world.num_classes)
    schedule = build_schedule(
        catalog, config.schedule.base_size, config.schedule.inc_size, config.schedule.order_seed
    )
    aux = _effective_auxiliary(config)
    aux_set = compose_auxiliary(schedule, aux, seed)
    overlap = aux_set & schedule.step_classes(1)
    if overlap:
        raise ProtocolViolationError(f"auxiliary set overlaps the initial step: {sorted(overlap)}")
    models = _world_models(config)

    stage = _train_stage(config, seed, schedule, aux_set, models)
    frozen = stage.extractor

    gap = GapParams()  # real sampling ignores the gap parameters
    per_step_data = {
        t: [
            s
            for cid in sorted(schedule.step_classes(t))
            for s in sample_class(models[cid], config.sampling.train_per_class, REAL, gap, seed)
        ]
        for t in range(1, schedule.num_steps + 1)
    }
    gate = StepDataGate(per_step_data)
    test_set = [
        s
        for cid in range(config.world.num_classes)
        for s in sample_class(
            models[cid], config.sampling.test_per_class, REAL, gap, seed, split=TEST
        )
    ]
    embedded_test = _embed_samples(frozen, test_set)

    head_cfg = replace(config.head, retrain_seed=seed)
    state = empty_head(head_cfg)
    per_step: list[StepAccuracy] = []
    digests: list[str] = []
    for t in range(1, schedule.num_steps + 1):
        feats = by_class(_embed_samples(frozen, gate.training_samples(t)))
        state = update_head(state, feats, head_cfg)
        per_step.append(
            evaluate_seen(predict_fn(state), embedded_test, schedule.seen_classes(t), step_index=t)
        )
        digests.append(frozen.weight_digest())
        gate.advance()

    if any(d != stage.digest for d in digests):
        raise ProtocolViolationError("extractor weights changed after the freeze")

    report = RunReport(
        per_step=tuple(per_step),
        average_incremental_accuracy=average_incremental_accuracy(per_step),
        last_accuracy=per_step[-1].top1,
        config_digest=config.digest(),
        seed=seed,
    )
    artifacts = RunArtifacts(
        schedule=schedule,
        auxiliary_classes=aux_set,
        extractor=frozen,
        restricted_head=stage.restricted_head,
        head_state=state,
        digest_at_freeze=stage.digest,
        digest_per_step=tuple(digests),
        epoch_losses=stage.epoch_losses,
    )
    return report, artifacts


def run_fpcil_scenario(config: ScenarioConfig, seed: int | None = None) -> RunReport:
    report, _ = run_with_artifacts(config, seed)
    return report


# ---------------------------------------------------------------------------
# Reports on disk


def run_directory(config: ScenarioConfig, seed: int, output_dir=None) -> Path:
    base = Path(output_dir if output_dir is not None else config.output_dir)
    return base / f"run-{config.digest()[:12]}-{seed}"


def write_report(report: RunReport, directory) -> tuple[Path, Path]:
    """Write report.json plus per_step.csv; reruns are byte-identical."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        json_path = directory / "report.json"
        csv_path = directory / "per_step.csv"
        json_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step_index", "seen_classes", "correct", "total", "top1"])
            for s in report.per_step:
                writer.writerow([s.step_index, len(s.seen_classes), s.correct, s.total, s.top1])
    except OSError as err:
        raise DataFormatError(f"cannot write report under {directory}: {err}") from err
    return json_path, csv_path


def read_report(path) -> RunReport:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    try:
        return RunReport.from_dict(json.loads(path.read_text()))
    except OSError as err:
        raise DataFormatError(f"cannot read report {path}: {err}") from err
    except (json.JSONDecodeError, KeyError) as err:
        raise DataFormatError(f"malformed report {path}: {err}") from err


# ---------------------------------------------------------------------------
# Experiment matrices


@dataclass(frozen=True)
class MatrixScenario:
    label: str
    config: ScenarioConfig
    baseline: str | None = None


@dataclass(frozen=True)
class ExperimentMatrix:
    scenarios: tuple[MatrixScenario, ...]

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        labels = [s.label for s in self.scenarios]
        if len(set(labels)) != len(labels):
            raise MatrixError(f"duplicate scenario labels: {labels}")


@dataclass(frozen=True)
class MatrixRow:
    label: str
    baseline: str | None
    n_seeds: int
    aia_mean: float
    aia_sd: float
    last_mean: float
    last_sd: float
    improvement_pp: float | None
    aia_values: tuple[float, ...]
    last_values: tuple[float, ...]


@dataclass(frozen=True)
class MatrixResult:
    rows: tuple[MatrixRow, ...]

    def row(self, label: str) -> MatrixRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise MatrixError(f"no row labeled {label!r}")

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "label": r.label,
                    "baseline": r.baseline,
                    "n_seeds": r.n_seeds,
                    "aia_mean": r.aia_mean,
                    "aia_sd": r.aia_sd,
                    "last_mean": r.last_mean,
                    "last_sd": r.last_sd,
                    "improvement_pp": r.improvement_pp,
                    "aia_values": list(r.aia_values),
                    "last_values": list(r.last_values),
                }
                for r in self.rows
            ]
        }

    def render(self) -> str:
        """Fixed-width text table: AIA / Last as percentages, mean +- sd."""
        header = f"{'scenario':<28} {'seeds':>5} {'AIA %':>16} {'Last %':>16} {'vs baseline':>14}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            aia = f"{100 * r.aia_mean:.2f} +- {100 * r.aia_sd:.2f}"
            last = f"{100 * r.last_mean:.2f} +- {100 * r.last_sd:.2f}"
            imp = "" if r.improvement_pp is None else f"{r.improvement_pp:+.2f} p.p."
            lines.append(f"{r.label:<28} {r.n_seeds:>5} {aia:>16} {last:>16} {imp:>14}")
        return "\n".join(lines)


def _shared_field(matrix, name, getter):
    values = {s.label: getter(s.config) for s in matrix.scenarios}
    distinct = set(values.values())
    if len(distinct) != 1:
        raise MatrixError(f"scenarios disagree on shared {name}: {values}")


def run_matrix(matrix: ExperimentMatrix) -> MatrixResult:
    """Run every scenario over the shared eval seeds and tabulate.

    Scenarios must share world seed, schedule and eval seeds so that row
    differences isolate the treatment.  Improvement rows are percentage
    points of AIA against the named baseline scenario.
    """
    if len(matrix.scenarios) < 2:
        raise MatrixError(f"a matrix needs >= 2 scenarios, got {len(matrix.scenarios)}")
    _shared_field(matrix, "world seed", lambda c: c.world.seed)
    _shared_field(matrix, "world", lambda c: (c.world.num_classes, c.world.dim, c.world.separation, c.world.intra_sd))
    _shared_field(matrix, "schedule", lambda c: (c.schedule.base_size, c.schedule.inc_size, c.schedule.order_seed))
    _shared_field(matrix, "eval seeds", lambda c: c.eval_seeds)
    labels = {s.label for s in matrix.scenarios}
    for s in matrix.scenarios:
        if s.baseline is not None and s.baseline not in labels:
            raise MatrixError(f"scenario {s.label!r} names unknown baseline {s.baseline!r}")
        if s.baseline == s.label:
            raise MatrixError(f"scenario {s.label!r} is its own baseline")

    aia_by_label: dict[str, list[float]] = {}
    last_by_label: dict[str, list[float]] = {}
    for s in matrix.scenarios:
        reports = [run_fpcil_scenario(s.config, seed=seed) for seed in s.config.eval_seeds]
        aia_by_label[s.label] = [r.average_incremental_accuracy for r in reports]
        last_by_label[s.label] = [r.last_accuracy for r in reports]

    rows = []
    for s in matrix.scenarios:
        aias = aia_by_label[s.label]
        lasts = last_by_label[s.label]
        aia_mean = statistics.fmean(aias)
        improvement = None
        if s.baseline is not None:
            improvement = 100.0 * (aia_mean - statistics.fmean(aia_by_label[s.baseline]))
        rows.append(
            MatrixRow(
                label=s.label,
                baseline=s.baseline,
                n_seeds=len(aias),
                aia_mean=aia_mean,
                aia_sd=statistics.stdev(aias) if len(aias) > 1 else 0.0,
                last_mean=statistics.fmean(lasts),
                last_sd=statistics.stdev(lasts) if len(lasts) > 1 else 0.0,
                improvement_pp=improvement,
                aia_values=tuple(aias),
                last_values=tuple(lasts),
            )
        )
    return MatrixResult(rows=tuple(rows))


def write_matrix_result(result: MatrixResult, directory) -> tuple[Path, Path]:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        json_path = directory / "matrix.json"
        csv_path = directory / "matrix.csv"
        json_path.write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["label", "baseline", "n_seeds", "aia_mean", "aia_sd", "last_mean", "last_sd", "improvement_pp"]
            )
            for r in result.rows:
                writer.writerow(
                    [r.label, r.baseline or "", r.n_seeds, r.aia_mean, r.aia_sd, r.last_mean, r.last_sd,
                     "" if r.improvement_pp is None else r.improvement_pp]
                )
    except OSError as err:
        raise DataFormatError(f"cannot write matrix result under {directory}: {err}") from err
    return json_path, csv_path


# ---------------------------------------------------------------------------
# Matrix builders for the standard comparisons


def _with_aux(config: ScenarioConfig, mode: str, k_percent: float = 100.0) -> ScenarioConfig:
    return replace(config, auxiliary=replace(config.auxiliary, mode=mode, k_percent=k_percent))


def aux_sweep_matrix(config: ScenarioConfig, k_values=(0, 33, 50, 66, 100)) -> ExperimentMatrix:
    """No-aux baseline plus a partial(k) sweep; k=100 equals the oracle."""
    scenarios = [MatrixScenario(label="none", config=_with_aux(config, AUX_NONE))]
    for k in k_values:
        scenarios.append(
            MatrixScenario(
                label=f"partial-{int(k)}",
                config=_with_aux(config, AUX_PARTIAL, float(k)),
                baseline="none",
            )
        )
    return ExperimentMatrix(tuple(scenarios))


def head_comparison_matrix(config: ScenarioConfig, heads=("ncm", "fetril", "fecam")) -> ExperimentMatrix:
    """Per head: a no-aux baseline row and an oracle row measured against it."""
    scenarios = []
    for kind in heads:
        with_head = replace(config, head=replace(config.head, kind=kind))
        scenarios.append(
            MatrixScenario(label=f"{kind}/baseline", config=_with_aux(with_head, AUX_NONE))
        )
        scenarios.append(
            MatrixScenario(
                label=f"{kind}/oracle",
                config=_with_aux(with_head, AUX_ORACLE),
                baseline=f"{kind}/baseline",
            )
        )
    return ExperimentMatrix(tuple(scenarios))


def sample_count_matrix(config: ScenarioConfig, counts=(50, 500)) -> ExperimentMatrix:
    """Oracle runs that differ only in synthetic samples per class."""
    counts = sorted(int(n) for n in counts)
    scenarios = []
    for n in counts:
        cfg = _with_aux(config, AUX_ORACLE)
        cfg = replace(cfg, auxiliary=replace(cfg.auxiliary, n_per_class=n))
        scenarios.append(
            MatrixScenario(
                label=f"n-{n}",
                config=cfg,
                baseline=None if n == counts[0] else f"n-{counts[0]}",
            )
        )
    return ExperimentMatrix(tuple(scenarios))


def reference_scenario(eval_seeds=(0,), output_dir: str = "runs") -> ScenarioConfig:
    """The default desk-scale simulation all standard comparisons run on."""
    return ScenarioConfig(
        world=WorldConfig(num_classes=100, dim=64, separation=6.0, intra_sd=1.0, seed=0),
        schedule=ScheduleSpec(base_size=0, inc_size=10, order_seed=0),
        auxiliary=AuxiliarySpec(
            mode=AUX_ORACLE,
            n_per_class=500,
            gap=GapParams(delta=2.0, diversity_scale=1.5),
        ),
        composition=COMP_DEFAULT,
        extractor=ExtractorSpec(
            layer_dims=(64, 96, 48),
            train=TrainConfig(
                epochs=10, batch_size=256, lr_init=0.05, weight_decay=1e-3, momentum=0.9
            ),
        ),
        head=HeadConfig(kind=FETRIL),
        sampling=SamplingSpec(train_per_class=40, test_per_class=50, distractor_classes=100),
        eval_seeds=tuple(eval_seeds),
        output_dir=output_dir,
    )
