"""Class-incremental learning formalism.

Classes arrive in disjoint steps Y_1..Y_T.  After each step the classifier
is evaluated on the test data of every class seen so far, with no step
identity available at test time.  The headline metric is the average
incremental accuracy: the mean of the per-step top-1 accuracies, first step
included.

Schedules follow the B-i/Inc-j naming: i classes in the first step, j in
each later step; B0 means every step has j classes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import rng
from .errors import ConfigurationError, EvaluationError, MetricError
from .samples import EmbeddingSample, stack

PredictFn = Callable[[np.ndarray], np.ndarray]
"""Vectorized predictor: an (n, d) feature matrix to an (n,) class-id array.
It receives only feature vectors -- never labels, splits or step indices."""


@dataclass(frozen=True)
class ClassEntry:
    class_id: int
    name: str
    definition: str = ""


@dataclass(frozen=True)
class ClassCatalog:
    """The full set of classes the world can present, with names and
    one-line definitions used by the prompt builders."""

    entries: tuple[ClassEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        ids = [e.class_id for e in self.entries]
        if ids != list(range(len(ids))):
            raise ConfigurationError(
                f"class ids must be contiguous from 0, got {ids[:8]}{'...' if len(ids) > 8 else ''}"
            )
        names = [e.name.strip().lower() for e in self.entries]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ConfigurationError(f"duplicate class names (case-insensitive): {dupes}")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def class_ids(self) -> tuple[int, ...]:
        return tuple(e.class_id for e in self.entries)

    def name_of(self, class_id: int) -> str:
        return self.entries[class_id].name

    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    @staticmethod
    def generic(num_classes: int) -> "ClassCatalog":
        """Placeholder catalog for purely simulated worlds."""
        width = len(str(max(num_classes - 1, 0)))
        return ClassCatalog(
            tuple(
                ClassEntry(i, f"class-{i:0{width}d}", f"simulated class {i}")
                for i in range(num_classes)
            )
        )


@dataclass(frozen=True)
class IncrementalSchedule:
    """Ordered partition of the catalog into steps Y_1..Y_T.

    ``steps[i]`` holds class ids in shuffled order; step membership is a
    set, the stored order just makes serialization reproducible.
    """

    steps: tuple[tuple[int, ...], ...]
    base_size: int
    inc_size: int
    order_seed: int

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(tuple(s) for s in self.steps))
        seen: set[int] = set()
        for t, step in enumerate(self.steps, start=1):
            overlap = seen.intersection(step)
            if overlap:
                raise ConfigurationError(f"step {t} repeats class ids {sorted(overlap)}")
            if len(set(step)) != len(step):
                raise ConfigurationError(f"step {t} has duplicate class ids")
            seen.update(step)
        sizes = [len(s) for s in self.steps]
        if self.base_size > 0:
            expected = [self.base_size] + [self.inc_size] * (len(sizes) - 1)
        else:
            expected = [self.inc_size] * len(sizes)
        if sizes != expected:
            raise ConfigurationError(f"step sizes {sizes} do not match B{self.base_size} Inc{self.inc_size}")

    @property
    def num_steps(self) -> int:
        return len(self.steps)

    def step_classes(self, step_index: int) -> frozenset[int]:
        """Class set of 1-based step ``step_index``."""
        return frozenset(self.steps[step_index - 1])

    def seen_classes(self, step_index: int) -> frozenset[int]:
        """Union of Y_1..Y_step."""
        seen: set[int] = set()
        for s in self.steps[:step_index]:
            seen.update(s)
        return frozenset(seen)

    def future_classes(self, step_index: int = 1) -> frozenset[int]:
        """Union of the steps after ``step_index``."""
        fut: set[int] = set()
        for s in self.steps[step_index:]:
            fut.update(s)
        return frozenset(fut)

    def all_classes(self) -> frozenset[int]:
        return self.seen_classes(self.num_steps)

    def to_json(self) -> str:
        return json.dumps(
            {
                "base_size": self.base_size,
                "inc_size": self.inc_size,
                "order_seed": self.order_seed,
                "steps": [list(s) for s in self.steps],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "IncrementalSchedule":
        d = json.loads(text)
        return IncrementalSchedule(
            steps=tuple(tuple(s) for s in d["steps"]),
            base_size=d["base_size"],
            inc_size=d["inc_size"],
            order_seed=d["order_seed"],
        )


@dataclass(frozen=True)
class StepAccuracy:
    """Seen-class top-1 accuracy after one step, kept as exact counts."""

    step_index: int
    seen_classes: frozenset[int]
    correct: int
    total: int

    def __post_init__(self):
        object.__setattr__(self, "seen_classes", frozenset(self.seen_classes))
        if self.step_index < 1:
            raise MetricError(f"step_index must be >= 1, got {self.step_index}")
        if not 0 <= self.correct <= self.total or self.total <= 0:
            raise MetricError(f"bad counts: correct={self.correct} total={self.total}")

    @property
    def top1(self) -> float:
        return self.correct / self.total

    @property
    def exact_top1(self) -> Fraction:
        return Fraction(self.correct, self.total)


@dataclass(frozen=True)
class RunReport:
    """Per-step accuracies plus the two summary numbers for one run."""

    per_step: tuple[StepAccuracy, ...]
    average_incremental_accuracy: float
    last_accuracy: float
    config_digest: str
    seed: int

    def to_dict(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "seed": self.seed,
            "average_incremental_accuracy": self.average_incremental_accuracy,
            "last_accuracy": self.last_accuracy,
            "per_step": [
                {
                    "step_index": s.step_index,
                    "seen_classes": sorted(s.seen_classes),
                    "correct": s.correct,
                    "total": s.total,
                    "top1": s.top1,
                }
                for s in self.per_step
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "RunReport":
        per_step = tuple(
            StepAccuracy(
                step_index=s["step_index"],
                seen_classes=frozenset(s["seen_classes"]),
                correct=s["correct"],
                total=s["total"],
            )
            for s in d["per_step"]
        )
        return RunReport(
            per_step=per_step,
            average_incremental_accuracy=d["average_incremental_accuracy"],
            last_accuracy=d["last_accuracy"],
            config_digest=d["config_digest"],
            seed=d["seed"],
        )


def build_schedule(
    catalog: ClassCatalog, base_size: int, inc_size: int, order_seed: int
) -> IncrementalSchedule:
    """Shuffle the catalog with a seeded Fisher-Yates pass and cut it into
    B-``base_size`` Inc-``inc_size`` steps, front to back."""
    n = len(catalog)
    if base_size < 0:
        raise ConfigurationError(f"base_size must be >= 0, got {base_size}")
    if inc_size < 1:
        raise ConfigurationError(f"inc_size must be >= 1, got {inc_size}")
    if base_size >= n:
        raise ConfigurationError(f"base_size {base_size} must be smaller than the catalog ({n})")
    if (n - base_size) % inc_size != 0:
        raise ConfigurationError(
            f"cannot split {n} classes as B{base_size} Inc{inc_size}: "
            f"{n} - {base_size} is not divisible by {inc_size}"
        )
    order = rng.fisher_yates(catalog.class_ids, rng.stream(order_seed, "schedule"))
    steps: list[tuple[int, ...]] = []
    cursor = 0
    if base_size > 0:
        steps.append(tuple(order[:base_size]))
        cursor = base_size
    while cursor < n:
        steps.append(tuple(order[cursor : cursor + inc_size]))
        cursor += inc_size
    return IncrementalSchedule(tuple(steps), base_size, inc_size, order_seed)


def evaluate_seen(
    predict_fn: PredictFn,
    test_set: Sequence[EmbeddingSample],
    seen: Iterable[int],
    step_index: int = 1,
) -> StepAccuracy:
    """Top-1 accuracy over exactly the test samples of seen classes.

    Samples of unseen classes are filtered out; the predictor sees feature
    vectors only.
    """
    seen = frozenset(seen)
    kept = [s for s in test_set if s.class_id in seen]
    if not kept:
        raise EvaluationError("no test samples belong to the seen classes")
    X, y = stack(kept)
    pred = np.asarray(predict_fn(X))
    if pred.shape != y.shape:
        raise EvaluationError(f"predictor returned shape {pred.shape}, expected {y.shape}")
    correct = int(np.sum(pred == y))
    return StepAccuracy(step_index=step_index, seen_classes=seen, correct=correct, total=len(kept))


def average_incremental_accuracy(per_step: Sequence[StepAccuracy | float]) -> float:
    """Exact arithmetic mean of the per-step top-1 accuracies.

    Accepts StepAccuracy records (preferred: the mean is taken over exact
    correct/total ratios) or bare floats.  Summation is done in rationals so
    the result does not depend on accumulation order.
    """
    per_step = list(per_step)
    if not per_step:
        raise MetricError("average over an empty step list")
    total = Fraction(0)
    for i, s in enumerate(per_step):
        if isinstance(s, StepAccuracy):
            if s.step_index != i + 1:
                raise MetricError(
                    f"step indices must be consecutive from 1, got {s.step_index} at position {i}"
                )
            total += s.exact_top1
        else:
            total += Fraction(float(s))
    return float(total / len(per_step))
