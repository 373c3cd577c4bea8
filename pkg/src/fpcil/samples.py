"""Feature-vector samples and small dataset helpers.

An :class:`EmbeddingSample` is one feature vector tagged with its class, its
origin (real or synthetic) and its split (train or test).  Lists of samples
are the interchange currency between the world simulator, the file bridge
and the training/evaluation code; compute-heavy paths stack them into
matrices once via :func:`stack`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError

REAL = "real"
SYNTHETIC = "synthetic"
TRAIN = "train"
TEST = "test"

_ORIGINS = (REAL, SYNTHETIC)
_SPLITS = (TRAIN, TEST)


@dataclass(frozen=True)
class EmbeddingSample:
    """One feature vector with class label, origin tag and split."""

    feature: np.ndarray
    class_id: int
    origin: str = REAL
    split: str = TRAIN

    def __post_init__(self):
        if self.origin not in _ORIGINS:
            raise ValueError(f"origin must be one of {_ORIGINS}, got {self.origin!r}")
        if self.split not in _SPLITS:
            raise ValueError(f"split must be one of {_SPLITS}, got {self.split!r}")
        f = np.asarray(self.feature, dtype=np.float64)
        if f.ndim != 1:
            raise ShapeError(f"feature must be a vector, got shape {f.shape}")
        f.setflags(write=False)
        object.__setattr__(self, "feature", f)


def stack(samples) -> tuple[np.ndarray, np.ndarray]:
    """Stack samples into an (n, d) feature matrix and an (n,) label array."""
    samples = list(samples)
    if not samples:
        raise ShapeError("cannot stack an empty sample list")
    dims = {s.feature.shape[0] for s in samples}
    if len(dims) != 1:
        raise ShapeError(f"inconsistent feature dims: {sorted(dims)}")
    X = np.stack([s.feature for s in samples])
    y = np.array([s.class_id for s in samples], dtype=np.int64)
    return X, y


def by_class(samples) -> dict[int, np.ndarray]:
    """Group samples into per-class feature matrices (insertion-ordered)."""
    groups: dict[int, list[np.ndarray]] = {}
    for s in samples:
        groups.setdefault(s.class_id, []).append(s.feature)
    return {cid: np.stack(feats) for cid, feats in groups.items()}
