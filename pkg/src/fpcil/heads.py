"""Classifier heads that update on top of a frozen feature extractor.

Three heads, all exemplar-free (they retain class summaries, never raw
feature sets from earlier steps):

- NCM: nearest class mean under squared Euclidean distance.
- FeTrIL-style: past classes are represented by pseudo-features, built by
  translating the feature batch of the nearest new class onto the stored
  past prototype; a linear softmax head is retrained from scratch each step.
- FeCAM-style: per-class Mahalanobis distance on power-transformed features
  with covariance shrinkage and correlation normalization.

Tie breaking is always by lowest class id; fitted state is read-only for
prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    ConfigurationError,
    EvaluationError,
    NumericalError,
    ProtocolViolationError,
    ShapeError,
    StatisticsError,
)
from .extractor import LinearHeadWeights, TrainConfig, train_linear_head_arrays

NCM = "ncm"
FETRIL = "fetril"
FECAM = "fecam"
HEAD_KINDS = (NCM, FETRIL, FECAM)

# Display names used in reports.
HEAD_LABELS = {NCM: "NCM", FETRIL: "FeTrIL", FECAM: "FeCAM"}

_NCM_CHUNK = 512


@dataclass(frozen=True)
class ClassPrototype:
    class_id: int
    mean_feature: np.ndarray
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ConfigurationError(f"prototype needs count >= 1, got {self.count}")
        mean = np.asarray(self.mean_feature, dtype=np.float64)
        if mean.ndim != 1:
            raise ShapeError(f"prototype mean must be 1-D, got shape {mean.shape}")
        object.__setattr__(self, "mean_feature", mean)


@dataclass(frozen=True)
class FeCamClassStats:
    class_id: int
    proto_t: np.ndarray
    cov_normalized: np.ndarray
    lam: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        cov = np.asarray(self.cov_normalized, dtype=np.float64)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ShapeError(f"covariance must be square, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise StatisticsError(f"class {self.class_id}: covariance not symmetric")
        if np.max(np.abs(np.diag(cov) - 1.0)) > 1e-10:
            raise StatisticsError(f"class {self.class_id}: normalized covariance lacks unit diagonal")


@dataclass(frozen=True)
class SharedCovState:
    """Pooled within-class scatter of transformed features (for shared mode)."""

    scatter: np.ndarray
    dof: int


@dataclass(frozen=True)
class HeadConfig:
    kind: str = NCM
    fecam_lambda: float = 0.5
    fecam_gamma1: float = 1.0
    fecam_gamma2: float = 1.0
    fecam_shared_cov: bool = False
    retrain_epochs: int = 50
    retrain_lr: float = 0.1
    retrain_batch_size: int = 128
    retrain_seed: int = 0

    def __post_init__(self):
        if self.kind not in HEAD_KINDS:
            raise ConfigurationError(f"unknown head kind {self.kind!r}, expected one of {HEAD_KINDS}")


@dataclass(frozen=True)
class HeadState:
    kind: str
    prototypes: tuple[ClassPrototype, ...] = ()
    linear: LinearHeadWeights | None = None
    fecam_stats: tuple[FeCamClassStats, ...] = ()
    fecam_shared: SharedCovState | None = None

    def __post_init__(self):
        if self.kind not in HEAD_KINDS:
            raise ConfigurationError(f"unknown head kind {self.kind!r}")
        object.__setattr__(self, "prototypes", tuple(self.prototypes))
        object.__setattr__(self, "fecam_stats", tuple(self.fecam_stats))
        # only the fields implied by the kind may be populated
        if self.kind != FETRIL and self.linear is not None:
            raise ConfigurationError(f"{self.kind} head must not carry a linear classifier")
        if self.kind != FECAM and (self.fecam_stats or self.fecam_shared is not None):
            raise ConfigurationError(f"{self.kind} head must not carry covariance statistics")

    def class_ids(self) -> tuple[int, ...]:
        return tuple(p.class_id for p in self.prototypes)

    def retained_arrays(self):
        """Every array the head keeps between steps, for audit."""
        for p in self.prototypes:
            yield p.mean_feature
        if self.linear is not None:
            yield self.linear.matrix
            yield self.linear.bias
        for s in self.fecam_stats:
            yield s.proto_t
            yield s.cov_normalized
        if self.fecam_shared is not None:
            yield self.fecam_shared.scatter


def empty_head(config: HeadConfig) -> HeadState:
    return HeadState(kind=config.kind)


def class_prototypes(features_by_class: dict[int, np.ndarray]) -> list[ClassPrototype]:
    """Exact per-class means, sorted by class id."""
    out = []
    for cid in sorted(features_by_class):
        F = np.asarray(features_by_class[cid], dtype=np.float64)
        if F.ndim != 2 or F.shape[0] < 1:
            raise ShapeError(f"class {cid}: expected a nonempty (n, d) feature array, got {F.shape}")
        out.append(ClassPrototype(class_id=int(cid), mean_feature=F.mean(axis=0), count=F.shape[0]))
    return out


# ---------------------------------------------------------------------------
# NCM


def _sorted_means(prototypes):
    protos = sorted(prototypes, key=lambda p: p.class_id)
    if not protos:
        raise EvaluationError("no prototypes to predict with")
    ids = np.array([p.class_id for p in protos])
    M = np.stack([p.mean_feature for p in protos])
    return ids, M


def ncm_predict_batch(prototypes, X: np.ndarray) -> np.ndarray:
    """Nearest prototype mean for each row; ties go to the lowest class id."""
    ids, M = _sorted_means(prototypes)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != M.shape[1]:
        raise ShapeError(f"expected (n, {M.shape[1]}) features, got {X.shape}")
    out = np.empty(X.shape[0], dtype=ids.dtype)
    for lo in range(0, X.shape[0], _NCM_CHUNK):
        chunk = X[lo : lo + _NCM_CHUNK]
        d2 = np.sum((chunk[:, None, :] - M[None, :, :]) ** 2, axis=2)
        out[lo : lo + _NCM_CHUNK] = ids[np.argmin(d2, axis=1)]
    return out


def ncm_predict(prototypes, x: np.ndarray) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a single feature vector, got shape {x.shape}")
    return int(ncm_predict_batch(prototypes, x[None, :])[0])


# ---------------------------------------------------------------------------
# FeTrIL


def fetril_pseudo_features(donor_features, donor_mean, target_mean) -> np.ndarray:
    """Translate a donor feature batch onto a target prototype."""
    F = np.asarray(donor_features, dtype=np.float64)
    donor_mean = np.asarray(donor_mean, dtype=np.float64)
    target_mean = np.asarray(target_mean, dtype=np.float64)
    if F.ndim != 2 or F.shape[0] < 1:
        raise ShapeError(f"need a nonempty (n, d) donor batch, got {F.shape}")
    if donor_mean.shape != (F.shape[1],) or target_mean.shape != (F.shape[1],):
        raise ShapeError(
            f"mean shapes {donor_mean.shape}/{target_mean.shape} do not match features {F.shape}"
        )
    return F + (target_mean - donor_mean)


def fetril_step(
    state: HeadState,
    new_features: dict[int, np.ndarray],
    past_prototypes,
    config: TrainConfig,
) -> HeadState:
    """One incremental update of the pseudo-feature translation head.

    Each past class borrows the feature batch of the new class whose
    prototype is nearest to its own, translated onto the stored past mean.
    The linear head is retrained from scratch on actual-new plus
    pseudo-past features; prototypes are extended with the new means.
    """
    if state.kind != FETRIL:
        raise ConfigurationError(f"fetril_step on a {state.kind} head")
    if not new_features:
        raise ProtocolViolationError("incremental step brought no new classes")
    past = sorted(past_prototypes, key=lambda p: p.class_id)
    overlap = {p.class_id for p in past} & set(new_features)
    if overlap:
        raise ProtocolViolationError(f"new classes overlap past prototypes: {sorted(overlap)}")

    new_protos = class_prototypes(new_features)
    new_ids = [p.class_id for p in new_protos]
    new_means = np.stack([p.mean_feature for p in new_protos])

    xs = [np.asarray(new_features[cid], dtype=np.float64) for cid in new_ids]
    ys = [np.full(len(new_features[cid]), cid) for cid in new_ids]
    for p in past:
        d2 = np.sum((new_means - p.mean_feature) ** 2, axis=1)
        donor = new_protos[int(np.argmin(d2))]
        pseudo = fetril_pseudo_features(
            new_features[donor.class_id], donor.mean_feature, p.mean_feature
        )
        xs.append(pseudo)
        ys.append(np.full(len(pseudo), p.class_id))

    class_ids = sorted([p.class_id for p in past] + new_ids)
    linear = train_linear_head_arrays(np.concatenate(xs), np.concatenate(ys), class_ids, config)
    prototypes = tuple(sorted(list(past) + new_protos, key=lambda p: p.class_id))
    return replace(state, prototypes=prototypes, linear=linear)


# ---------------------------------------------------------------------------
# FeCAM


def tukey_transform(x: np.ndarray, lam: float) -> np.ndarray:
    """Power transform sign(x) * |x|**lam, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    if lam == 1.0:
        return x.copy()
    return np.sign(x) * np.abs(x) ** lam


def _shrink_and_normalize(cov: np.ndarray, gamma1: float, gamma2: float, class_id) -> np.ndarray:
    d = cov.shape[0]
    v_diag = float(np.trace(cov)) / d
    v_off = float(cov.sum() - np.trace(cov)) / (d * d - d) if d > 1 else 0.0
    shrunk = cov + gamma1 * v_diag * np.eye(d) + gamma2 * v_off * (np.ones((d, d)) - np.eye(d))
    diag = np.diag(shrunk)
    if np.any(diag <= 0):
        raise StatisticsError(f"class {class_id}: degenerate covariance after shrinkage")
    scale = np.sqrt(diag)
    normalized = shrunk / np.outer(scale, scale)
    # enforce exact symmetry so later factorizations see a clean input
    return (normalized + normalized.T) / 2.0


def fecam_fit_class(
    class_id: int,
    features,
    lam: float = 0.5,
    gamma1: float = 1.0,
    gamma2: float = 1.0,
) -> FeCamClassStats:
    """Per-class statistics: transformed prototype plus normalized covariance."""
    F = np.asarray(features, dtype=np.float64)
    if F.ndim != 2 or F.shape[0] < 2:
        raise StatisticsError(f"class {class_id}: need >= 2 features to fit a covariance, got {F.shape}")
    T = tukey_transform(F, lam)
    proto_t = T.mean(axis=0)
    cov = np.cov(T, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    return FeCamClassStats(
        class_id=int(class_id),
        proto_t=proto_t,
        cov_normalized=_shrink_and_normalize(cov, gamma1, gamma2, class_id),
        lam=lam,
        gamma1=gamma1,
        gamma2=gamma2,
    )


def _cholesky_with_jitter(cov: np.ndarray, class_id):
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-8 * float(np.mean(np.diag(cov)))
    try:
        return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
    except np.linalg.LinAlgError:
        raise NumericalError(
            f"class {class_id}: covariance not positive definite even after jitter"
        ) from None


def fecam_predict_batch(stats, X: np.ndarray) -> np.ndarray:
    """Mahalanobis argmin over per-class statistics; ties to lowest class id."""
    ordered = sorted(stats, key=lambda s: s.class_id)
    if not ordered:
        raise EvaluationError("no class statistics to predict with")
    X = np.asarray(X, dtype=np.float64)
    d = ordered[0].proto_t.shape[0]
    if X.ndim != 2 or X.shape[1] != d:
        raise ShapeError(f"expected (n, {d}) features, got {X.shape}")
    dists = np.empty((X.shape[0], len(ordered)))
    for j, s in enumerate(ordered):
        T = tukey_transform(X, s.lam)
        L = _cholesky_with_jitter(s.cov_normalized, s.class_id)
        Y = solve_triangular(L, (T - s.proto_t).T, lower=True)
        dists[:, j] = np.sum(Y * Y, axis=0)
    ids = np.array([s.class_id for s in ordered])
    return ids[np.argmin(dists, axis=1)]


def fecam_predict(stats, x: np.ndarray) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a single feature vector, got shape {x.shape}")
    return int(fecam_predict_batch(stats, x[None, :])[0])


def _fecam_update(state, features_by_class, config):
    new_protos = class_prototypes(features_by_class)
    prototypes = tuple(sorted(list(state.prototypes) + new_protos, key=lambda p: p.class_id))
    if not config.fecam_shared_cov:
        fitted = [
            fecam_fit_class(
                cid,
                features_by_class[cid],
                config.fecam_lambda,
                config.fecam_gamma1,
                config.fecam_gamma2,
            )
            for cid in sorted(features_by_class)
        ]
        stats = tuple(sorted(list(state.fecam_stats) + fitted, key=lambda s: s.class_id))
        return replace(state, prototypes=prototypes, fecam_stats=stats)

    # Shared mode pools within-class scatter of transformed features across
    # all classes seen so far, so low-sample classes borrow strength.  Only
    # the (d, d) scatter and its degrees of freedom persist.
    scatter = None if state.fecam_shared is None else state.fecam_shared.scatter.copy()
    dof = 0 if state.fecam_shared is None else state.fecam_shared.dof
    proto_ts = {s.class_id: s.proto_t for s in state.fecam_stats}
    for cid in sorted(features_by_class):
        F = np.asarray(features_by_class[cid], dtype=np.float64)
        if F.shape[0] < 2:
            raise StatisticsError(f"class {cid}: need >= 2 features to fit a covariance")
        T = tukey_transform(F, config.fecam_lambda)
        mu = T.mean(axis=0)
        R = T - mu
        scatter = R.T @ R if scatter is None else scatter + R.T @ R
        dof += F.shape[0] - 1
        proto_ts[cid] = mu
    if dof < 1:
        raise StatisticsError("shared covariance has no degrees of freedom")
    shared_cov = _shrink_and_normalize(
        scatter / dof, config.fecam_gamma1, config.fecam_gamma2, "shared"
    )
    stats = tuple(
        FeCamClassStats(
            class_id=cid,
            proto_t=proto_ts[cid],
            cov_normalized=shared_cov,
            lam=config.fecam_lambda,
            gamma1=config.fecam_gamma1,
            gamma2=config.fecam_gamma2,
        )
        for cid in sorted(proto_ts)
    )
    return replace(
        state,
        prototypes=prototypes,
        fecam_stats=stats,
        fecam_shared=SharedCovState(scatter=scatter, dof=dof),
    )


# ---------------------------------------------------------------------------
# Facade used by the runner


def update_head(state: HeadState, features_by_class: dict[int, np.ndarray], config: HeadConfig) -> HeadState:
    """Incorporate one step's real features into the head, per its kind."""
    if state.kind != config.kind:
        raise ConfigurationError(f"head state is {state.kind} but config says {config.kind}")
    if not features_by_class:
        raise ProtocolViolationError("incremental step brought no new classes")
    overlap = set(state.class_ids()) & set(features_by_class)
    if overlap:
        raise ProtocolViolationError(f"classes already fitted: {sorted(overlap)}")
    if state.kind == NCM:
        protos = tuple(
            sorted(
                list(state.prototypes) + class_prototypes(features_by_class),
                key=lambda p: p.class_id,
            )
        )
        return replace(state, prototypes=protos)
    if state.kind == FETRIL:
        train = TrainConfig(
            epochs=config.retrain_epochs,
            batch_size=config.retrain_batch_size,
            lr_init=config.retrain_lr,
            shuffle_seed=config.retrain_seed,
        )
        return fetril_step(state, features_by_class, state.prototypes, train)
    return _fecam_update(state, features_by_class, config)


def predict_fn(state: HeadState):
    """Vectorized prediction closure over fitted head state."""
    if state.kind == NCM:
        protos = state.prototypes
        return lambda X: ncm_predict_batch(protos, X)
    if state.kind == FETRIL:
        if state.linear is None:
            raise EvaluationError("linear classifier not trained yet")
        return state.linear.predict
    stats = state.fecam_stats
    if not stats:
        raise EvaluationError("no class statistics fitted yet")
    return lambda X: fecam_predict_batch(stats, X)
