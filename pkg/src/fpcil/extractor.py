"""Trainable-then-frozen MLP feature extractor and linear softmax heads.

The extractor is a stack of fully-connected layers with rectifier
activations; its last layer is the feature representation (so features are
always nonnegative).  A linear head on top produces class logits.  Joint
training minimizes mean softmax cross-entropy plus coupled L2 weight decay
(weights only, biases exempt) with momentum SGD under a cosine-to-zero
learning-rate schedule.  Gradients are exact analytic derivatives of that
loss; the test suite checks them against central finite differences.

After the initial step the extractor is frozen: its arrays become read-only
and every parameter-mutating operation refuses to run.  A content digest of
the weights lets the harness assert the freeze held for a whole run.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .errors import (
    ConfigurationError,
    FrozenExtractorError,
    ProtocolViolationError,
    ShapeError,
    TrainingError,
)
from .samples import EmbeddingSample, stack


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int = 128
    lr_init: float = 0.1
    weight_decay: float = 5e-4
    momentum: float = 0.9
    shuffle_seed: int = 0
    augment_noise_sd: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr_init <= 0:
            raise ConfigurationError(f"lr_init must be > 0, got {self.lr_init}")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.weight_decay < 0:
            raise ConfigurationError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.augment_noise_sd < 0:
            raise ConfigurationError(f"augment_noise_sd must be >= 0, got {self.augment_noise_sd}")


def cosine_lr(step: int, total_steps: int, lr_init: float) -> float:
    """lr at optimizer step ``step`` of ``total_steps``: lr_init at 0, 0 at the end."""
    return lr_init * (1.0 + np.cos(np.pi * step / total_steps)) / 2.0


@dataclass
class MlpExtractor:
    """Explicit-weight MLP; ``weights[i]`` has shape (dims[i], dims[i+1])."""

    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    frozen: bool = False

    @property
    def feature_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    def weight_digest(self) -> str:
        """SHA-256 over dims and all parameter bytes (float64, little-endian)."""
        h = hashlib.sha256()
        h.update(np.array(self.layer_dims, dtype="<i8").tobytes())
        for W, b in zip(self.weights, self.biases):
            h.update(np.ascontiguousarray(W, dtype="<f8").tobytes())
            h.update(np.ascontiguousarray(b, dtype="<f8").tobytes())
        return h.hexdigest()

    def copy(self) -> "MlpExtractor":
        return MlpExtractor(
            layer_dims=self.layer_dims,
            weights=[W.copy() for W in self.weights],
            biases=[b.copy() for b in self.biases],
            frozen=False,
        )


@dataclass(frozen=True)
class LinearHeadWeights:
    """Linear classifier: logits = features @ matrix.T + bias."""

    matrix: np.ndarray
    bias: np.ndarray
    class_ids: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_ids", tuple(self.class_ids))
        if len(set(self.class_ids)) != len(self.class_ids):
            raise ConfigurationError("head class_ids must be unique")
        if self.matrix.shape[0] != len(self.class_ids) or self.bias.shape != (self.matrix.shape[0],):
            raise ShapeError(
                f"head shapes {self.matrix.shape}/{self.bias.shape} do not match "
                f"{len(self.class_ids)} classes"
            )

    def row_index(self) -> dict[int, int]:
        return {cid: i for i, cid in enumerate(self.class_ids)}

    def logits(self, features: np.ndarray) -> np.ndarray:
        return features @ self.matrix.T + self.bias

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Vectorized argmax prediction mapped back to class ids."""
        ids = np.asarray(self.class_ids)
        return ids[np.argmax(self.logits(features), axis=1)]


@dataclass
class TrainResult:
    extractor: MlpExtractor
    head: LinearHeadWeights
    epoch_losses: list[float] = field(default_factory=list)


def init_extractor(layer_dims, init_seed: int) -> MlpExtractor:
    """Fan-in scaled uniform weights in +-sqrt(6/fan_in), zero biases."""
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ConfigurationError(f"need >= 2 positive layer dims, got {dims}")
    weights, biases = [], []
    for i in range(len(dims) - 1):
        gen = rng.stream(init_seed, "mlp-init", i)
        bound = np.sqrt(6.0 / dims[i])
        weights.append(gen.uniform(-bound, bound, size=(dims[i], dims[i + 1])))
        biases.append(np.zeros(dims[i + 1]))
    return MlpExtractor(layer_dims=dims, weights=weights, biases=biases)


def init_linear_head(class_ids, feature_dim: int, init_seed: int) -> LinearHeadWeights:
    class_ids = tuple(class_ids)
    gen = rng.stream(init_seed, "head-init")
    bound = np.sqrt(6.0 / feature_dim)
    return LinearHeadWeights(
        matrix=gen.uniform(-bound, bound, size=(len(class_ids), feature_dim)),
        bias=np.zeros(len(class_ids)),
        class_ids=class_ids,
    )


def embed(extractor: MlpExtractor, x: np.ndarray) -> np.ndarray:
    """Feature vector for one input: rectified forward pass, no classifier."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (extractor.input_dim,):
        raise ShapeError(f"expected input of shape ({extractor.input_dim},), got {x.shape}")
    return embed_batch(extractor, x[None, :])[0]


def embed_batch(extractor: MlpExtractor, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != extractor.input_dim:
        raise ShapeError(f"expected (n, {extractor.input_dim}) inputs, got {X.shape}")
    H = X
    for W, b in zip(extractor.weights, extractor.biases):
        H = np.maximum(H @ W + b, 0.0)
    return H


def _forward_joint(extractor, head, X):
    """Forward pass keeping per-layer activations for backprop."""
    acts = [X]
    H = X
    for W, b in zip(extractor.weights, extractor.biases):
        H = np.maximum(H @ W + b, 0.0)
        acts.append(H)
    logits = H @ head.matrix.T + head.bias
    return acts, logits


def _ce_loss_from_logits(logits, rows):
    m = np.max(logits, axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.sum(np.exp(logits - m), axis=1))
    picked = logits[np.arange(len(rows)), rows]
    return float(np.mean(lse - picked))


def _loss_and_grads_arrays(extractor, head, X, rows, weight_decay):
    n = X.shape[0]
    acts, logits = _forward_joint(extractor, head, X)
    m = np.max(logits, axis=1, keepdims=True)
    expz = np.exp(logits - m)
    probs = expz / np.sum(expz, axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.sum(expz, axis=1))
    loss = float(np.mean(lse - logits[np.arange(n), rows]))

    delta = probs
    delta[np.arange(n), rows] -= 1.0
    delta /= n

    d_head_W = delta.T @ acts[-1]
    d_head_b = delta.sum(axis=0)
    dH = delta @ head.matrix

    dWs, dbs = [None] * len(extractor.weights), [None] * len(extractor.weights)
    for i in range(len(extractor.weights) - 1, -1, -1):
        dZ = dH * (acts[i + 1] > 0.0)
        dWs[i] = acts[i].T @ dZ
        dbs[i] = dZ.sum(axis=0)
        if i > 0:
            dH = dZ @ extractor.weights[i].T
    if weight_decay:
        sq = sum(float(np.sum(W * W)) for W in extractor.weights)
        sq += float(np.sum(head.matrix * head.matrix))
        loss += weight_decay * 0.5 * sq
        for i, W in enumerate(extractor.weights):
            dWs[i] = dWs[i] + weight_decay * W
        d_head_W = d_head_W + weight_decay * head.matrix
    return loss, (dWs, dbs, d_head_W, d_head_b)


def loss_and_grads(extractor, head, batch, weight_decay: float = 0.0):
    """Mean cross-entropy plus weight decay, and its exact gradients.

    Returns (loss, grads) with grads = (dW list, db list, d_head_matrix,
    d_head_bias), matching parameter shapes.
    """
    if extractor.frozen:
        raise FrozenExtractorError("cannot compute training gradients on a frozen extractor")
    X, y = stack(batch) if batch and isinstance(batch[0], EmbeddingSample) else batch
    index = head.row_index()
    unknown = [int(c) for c in np.unique(y) if int(c) not in index]
    if unknown:
        raise TrainingError(f"batch contains class ids absent from the head: {unknown}")
    rows = np.array([index[int(c)] for c in y])
    return _loss_and_grads_arrays(extractor, head, np.asarray(X, dtype=np.float64), rows, weight_decay)


class _MomentumSgd:
    """Classic momentum: v <- mu v - lr g; p <- p + v."""

    def __init__(self, params, momentum):
        self.momentum = momentum
        self.vel = [np.zeros_like(p) for p in params]

    def step(self, params, grads, lr):
        for p, v, g in zip(params, self.vel, grads):
            v *= self.momentum
            v -= lr * g
            p += v


def train_initial(
    extractor: MlpExtractor,
    head: LinearHeadWeights,
    data,
    config: TrainConfig,
) -> TrainResult:
    """Joint SGD training of extractor and head on the given samples.

    Mini-batches are reshuffled every epoch from the shuffle seed; the last
    incomplete batch is kept.  Per-sample Gaussian jitter of sd
    ``augment_noise_sd`` is added at batch assembly (training only).
    Deterministic for fixed seeds; inputs are not mutated.
    """
    if extractor.frozen:
        raise FrozenExtractorError("train_initial called on a frozen extractor")
    X, y = stack(data) if data and isinstance(data[0], EmbeddingSample) else data
    X = np.asarray(X, dtype=np.float64)
    index = head.row_index()
    present = {int(c) for c in np.unique(y)}
    missing = [c for c in head.class_ids if c not in present]
    if missing:
        raise TrainingError(f"head classes have no training data: {missing}")
    unknown = sorted(present - set(head.class_ids))
    if unknown:
        raise TrainingError(f"training data contains class ids absent from the head: {unknown}")
    rows = np.array([index[int(c)] for c in y])

    ext = extractor.copy()
    hd = LinearHeadWeights(head.matrix.copy(), head.bias.copy(), head.class_ids)
    params = [*ext.weights, *ext.biases, hd.matrix, hd.bias]
    opt = _MomentumSgd(params, config.momentum)

    n = X.shape[0]
    n_batches = (n + config.batch_size - 1) // config.batch_size
    total_steps = config.epochs * n_batches
    losses = []
    step = 0
    for epoch in range(config.epochs):
        order = rng.stream(config.shuffle_seed, "epoch-shuffle", epoch).permutation(n)
        noise_rng = (
            rng.stream(config.shuffle_seed, "augment-noise", epoch)
            if config.augment_noise_sd > 0
            else None
        )
        epoch_loss = 0.0
        for b in range(n_batches):
            idx = order[b * config.batch_size : (b + 1) * config.batch_size]
            Xb = X[idx]
            if noise_rng is not None:
                Xb = Xb + config.augment_noise_sd * noise_rng.normal(size=Xb.shape)
            loss, (dWs, dbs, dhW, dhb) = _loss_and_grads_arrays(
                ext, hd, Xb, rows[idx], config.weight_decay
            )
            lr = cosine_lr(step, total_steps, config.lr_init)
            opt.step(params, [*dWs, *dbs, dhW, dhb], lr)
            step += 1
            epoch_loss += loss * len(idx)
        losses.append(epoch_loss / n)
    return TrainResult(extractor=ext, head=hd, epoch_losses=losses)


def freeze_extractor(extractor: MlpExtractor) -> MlpExtractor:
    """Mark the extractor frozen; its arrays become read-only in place."""
    for W in extractor.weights:
        W.setflags(write=False)
    for b in extractor.biases:
        b.setflags(write=False)
    return replace(extractor, frozen=True)


def finalize_initial_step(
    extractor: MlpExtractor, head: LinearHeadWeights, initial_classes
) -> tuple[MlpExtractor, LinearHeadWeights]:
    """Freeze the extractor and drop head rows outside the initial classes.

    The surviving rows are kept bit-identical and in their existing order.
    """
    initial = frozenset(int(c) for c in initial_classes)
    missing = sorted(initial - set(head.class_ids))
    if missing:
        raise ProtocolViolationError(f"initial classes missing from the head: {missing}")
    keep = [i for i, cid in enumerate(head.class_ids) if cid in initial]
    restricted = LinearHeadWeights(
        matrix=head.matrix[keep].copy(),
        bias=head.bias[keep].copy(),
        class_ids=tuple(head.class_ids[i] for i in keep),
    )
    return freeze_extractor(extractor), restricted


def train_linear_head_arrays(X, y, class_ids, config: TrainConfig) -> LinearHeadWeights:
    """Fit a linear softmax classifier on fixed features (array form)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    class_ids = tuple(int(c) for c in class_ids)
    present = {int(c) for c in np.unique(y)}
    missing = [c for c in class_ids if c not in present]
    if missing:
        raise TrainingError(f"no features for classes: {missing}")
    unknown = sorted(present - set(class_ids))
    if unknown:
        raise TrainingError(f"features carry class ids outside the head: {unknown}")
    index = {cid: i for i, cid in enumerate(class_ids)}
    rows = np.array([index[int(c)] for c in y])

    head = init_linear_head(class_ids, X.shape[1], config.shuffle_seed)
    W, b = head.matrix.copy(), head.bias.copy()
    opt = _MomentumSgd([W, b], config.momentum)
    n = X.shape[0]
    n_batches = (n + config.batch_size - 1) // config.batch_size
    total_steps = config.epochs * n_batches
    step = 0
    for epoch in range(config.epochs):
        order = rng.stream(config.shuffle_seed, "head-shuffle", epoch).permutation(n)
        for bi in range(n_batches):
            idx = order[bi * config.batch_size : (bi + 1) * config.batch_size]
            Xb, rb = X[idx], rows[idx]
            logits = Xb @ W.T + b
            m = np.max(logits, axis=1, keepdims=True)
            expz = np.exp(logits - m)
            probs = expz / np.sum(expz, axis=1, keepdims=True)
            delta = probs
            delta[np.arange(len(rb)), rb] -= 1.0
            delta /= len(rb)
            dW = delta.T @ Xb
            db = delta.sum(axis=0)
            if config.weight_decay:
                dW += config.weight_decay * W
            opt.step([W, b], [dW, db], cosine_lr(step, total_steps, config.lr_init))
            step += 1
    return LinearHeadWeights(matrix=W, bias=b, class_ids=class_ids)


def train_linear_head(features, class_ids, config: TrainConfig) -> LinearHeadWeights:
    """Fit a linear softmax classifier on (vector, class-id) pairs.

    The extractor is not involved: only the given features are used.
    Deterministic for a fixed shuffle seed (fresh seeded initialization,
    same schedule as the joint training).
    """
    pairs = list(features)
    if not pairs:
        raise TrainingError("no features given")
    X = np.stack([np.asarray(f, dtype=np.float64) for f, _ in pairs])
    y = np.array([int(c) for _, c in pairs])
    return train_linear_head_arrays(X, y, class_ids, config)
