"""Synthetic feature-space world.

Each class is an isotropic Gaussian blob in d dimensions.  "Real" samples
come from the blob itself; "synthetic" samples come from a shifted, widened
copy of it -- a two-parameter stand-in for the systematic gap between real
data and generated data: the mean moves by ``delta`` along a per-class unit
direction and the spread is multiplied by ``diversity_scale``.  With
delta=0 and diversity_scale=1 the two distributions coincide.

The auxiliary class set Y_S models future-class prediction quality: oracle
(all future classes), partial(k) (k% correct, the rest drawn from a
distractor pool of classes outside the target catalog) or an explicit set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import CompositionError, ConfigurationError
from .protocol import IncrementalSchedule
from .samples import REAL, SYNTHETIC, TRAIN, EmbeddingSample

AUX_NONE = "none"
AUX_ORACLE = "oracle"
AUX_PARTIAL = "partial"
AUX_EXPLICIT = "explicit"


@dataclass(frozen=True)
class WorldConfig:
    num_classes: int
    dim: int
    separation: float
    intra_sd: float
    seed: int

    def __post_init__(self):
        if self.num_classes < 2:
            raise ConfigurationError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.dim < 2:
            raise ConfigurationError(f"dim must be >= 2, got {self.dim}")
        if self.separation < 0:
            raise ConfigurationError(f"separation must be >= 0, got {self.separation}")
        if self.intra_sd <= 0:
            raise ConfigurationError(f"intra_sd must be > 0, got {self.intra_sd}")


@dataclass(frozen=True)
class GaussianClassModel:
    class_id: int
    mean: np.ndarray
    intra_sd: float
    gap_direction: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        gap = np.asarray(self.gap_direction, dtype=np.float64)
        if mean.shape != gap.shape or mean.ndim != 1:
            raise ConfigurationError(
                f"mean {mean.shape} and gap_direction {gap.shape} must be equal-length vectors"
            )
        if abs(np.linalg.norm(gap) - 1.0) > 1e-12:
            raise ConfigurationError("gap_direction must have unit norm")
        if self.intra_sd <= 0:
            raise ConfigurationError("intra_sd must be > 0")
        mean.setflags(write=False)
        gap.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "gap_direction", gap)


@dataclass(frozen=True)
class GapParams:
    """Synthetic-vs-real gap: mean shift magnitude and spread multiplier."""

    delta: float = 0.0
    diversity_scale: float = 1.0

    def __post_init__(self):
        if self.delta < 0:
            raise ConfigurationError(f"delta must be >= 0, got {self.delta}")
        if self.diversity_scale <= 0:
            raise ConfigurationError(f"diversity_scale must be > 0, got {self.diversity_scale}")


@dataclass(frozen=True)
class AuxiliarySpec:
    """How the auxiliary class set Y_S is composed and sampled."""

    mode: str = AUX_NONE
    k_percent: float = 100.0
    explicit_classes: frozenset[int] = frozenset()
    n_per_class: int = 0
    gap: GapParams = field(default_factory=GapParams)
    distractor_pool: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "explicit_classes", frozenset(self.explicit_classes))
        object.__setattr__(self, "distractor_pool", frozenset(self.distractor_pool))
        if self.mode not in (AUX_NONE, AUX_ORACLE, AUX_PARTIAL, AUX_EXPLICIT):
            raise ConfigurationError(f"unknown auxiliary mode {self.mode!r}")
        if self.mode == AUX_PARTIAL and not 0 <= self.k_percent <= 100:
            raise ConfigurationError(f"k_percent must be in [0, 100], got {self.k_percent}")
        if self.n_per_class < 0:
            raise ConfigurationError(f"n_per_class must be >= 0, got {self.n_per_class}")


def build_world(config: WorldConfig) -> list[GaussianClassModel]:
    """Draw the class means and per-class gap directions for a world.

    Means are isotropic Gaussian with per-coordinate sd separation/sqrt(d),
    so the expected distance between two means is separation * sqrt(2) *
    E[chi_d]/sqrt(d), which approaches separation * sqrt(2) for large d.
    """
    d = config.dim
    mean_rng = rng.stream(config.seed, "world-means")
    scale = config.separation / np.sqrt(d)
    means = mean_rng.normal(0.0, 1.0, size=(config.num_classes, d)) * scale
    models = []
    for cid in range(config.num_classes):
        gap_rng = rng.stream(config.seed, "gap-direction", cid)
        g = gap_rng.normal(size=d)
        g /= np.linalg.norm(g)
        models.append(
            GaussianClassModel(
                class_id=cid, mean=means[cid], intra_sd=config.intra_sd, gap_direction=g
            )
        )
    return models


def expected_pairwise_mean_distance(config: WorldConfig) -> float:
    """Closed-form E||mu_i - mu_j|| for means drawn by :func:`build_world`."""
    from scipy.special import gammaln

    d = config.dim
    # ||mu_i - mu_j|| = separation * sqrt(2/d) * chi_d
    chi_mean = np.sqrt(2.0) * np.exp(gammaln((d + 1) / 2.0) - gammaln(d / 2.0))
    return float(config.separation * np.sqrt(2.0 / d) * chi_mean)


def sample_class(
    model: GaussianClassModel,
    n: int,
    origin: str,
    gap: GapParams,
    seed: int,
    split: str = TRAIN,
) -> list[EmbeddingSample]:
    """Draw n samples of one class, real or synthetic.

    Real: N(mean, intra_sd^2 I).  Synthetic: N(mean + delta * gap_direction,
    (diversity_scale * intra_sd)^2 I).
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    if origin not in (REAL, SYNTHETIC):
        raise ConfigurationError(f"origin must be {REAL!r} or {SYNTHETIC!r}, got {origin!r}")
    gen = rng.stream(seed, "class-samples", model.class_id, origin, split)
    d = model.mean.shape[0]
    if origin == REAL:
        center = model.mean
        sd = model.intra_sd
    else:
        center = model.mean + gap.delta * model.gap_direction
        sd = gap.diversity_scale * model.intra_sd
    X = center + sd * gen.normal(size=(n, d))
    return [EmbeddingSample(X[i], model.class_id, origin=origin, split=split) for i in range(n)]


def compose_auxiliary(
    schedule: IncrementalSchedule, spec: AuxiliarySpec, seed: int
) -> frozenset[int]:
    """Pick the auxiliary class set Y_S for the initial step.

    oracle: exactly the future classes.  partial(k): floor(k*|future|/100)
    classes sampled from the future set, the remainder from the distractor
    pool, total size |future|.  explicit: the given set.  none: empty.
    """
    future = schedule.future_classes(1)
    if spec.mode == AUX_NONE:
        return frozenset()
    if spec.mode == AUX_ORACLE:
        return frozenset(future)
    if spec.mode == AUX_EXPLICIT:
        overlap = spec.explicit_classes & schedule.step_classes(1)
        if overlap:
            raise CompositionError(
                f"explicit auxiliary classes overlap the initial step: {sorted(overlap)}"
            )
        return frozenset(spec.explicit_classes)
    # partial(k)
    n_future = len(future)
    n_true = int(spec.k_percent * n_future) // 100
    n_wrong = n_future - n_true
    pool = sorted(spec.distractor_pool)
    if n_wrong > len(pool):
        raise CompositionError(
            f"partial({spec.k_percent:g}) needs {n_wrong} distractor classes, pool has {len(pool)}"
        )
    gen = rng.stream(seed, "aux-partial")
    chosen_true = rng.fisher_yates(sorted(future), gen)[:n_true]
    chosen_wrong = rng.fisher_yates(pool, gen)[:n_wrong]
    return frozenset(chosen_true) | frozenset(chosen_wrong)
