"""Core vocabulary: objects, labels, features, training sets, featurization.

Objects are records of named numeric attributes; features are expression-
language functions over those attributes; a feature set maps objects into
R^p. Labels are binary (0/1) throughout. Everything here is immutable
after construction and all operations are pure, so values can be shared
freely across threads and sessions.

Canonical ordering: wherever a set of objects must be linearized (training
set rows, universes), objects are sorted lexicographically by id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import exprlang

Label = int  # 0 or 1


def check_label(value: int) -> Label:
    if value not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Item:
    """A single classifiable object: an id plus named numeric attributes."""

    id: str
    attrs: Mapping[str, float]

    def __post_init__(self):
        if not self.attrs:
            raise ValueError(f"object {self.id!r} has no attributes")
        for name, value in self.attrs.items():
            if not math.isfinite(value):
                raise ValueError(
                    f"object {self.id!r} attribute {name!r} is not finite: {value}"
                )


@dataclass(frozen=True)
class FeatureDef:
    """A teachable feature: an id plus an expression over attribute names."""

    id: str
    expr: str
    tree: exprlang.Node = field(repr=False, compare=False)

    @classmethod
    def from_expr(cls, feature_id: str, expr: str) -> "FeatureDef":
        return cls(feature_id, expr, exprlang.parse(expr))

    def attr_names(self) -> set[str]:
        return exprlang.attr_names(self.tree)


@dataclass(frozen=True)
class FeatureSet:
    """An ordered selection of features; order defines vector components."""

    features: tuple[FeatureDef, ...]

    def __post_init__(self):
        ids = [f.id for f in self.features]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate feature ids in feature set: {ids}")

    @property
    def dim(self) -> int:
        return len(self.features)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.features)

    def extended(self, feature: FeatureDef) -> "FeatureSet":
        return FeatureSet(self.features + (feature,))


EMPTY_FEATURE_SET = FeatureSet(())


@dataclass(frozen=True)
class TrainingSet:
    """Labeled examples keyed by object id, kept in canonical id order."""

    examples: tuple[tuple[str, Label], ...]

    def __post_init__(self):
        ids = [oid for oid, _ in self.examples]
        if len(set(ids)) != len(ids):
            raise ValueError("training set has more than one label for an object")
        ordered = tuple(sorted(((oid, check_label(y)) for oid, y in self.examples)))
        object.__setattr__(self, "examples", ordered)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "TrainingSet":
        return cls(tuple(pairs))

    def __len__(self) -> int:
        return len(self.examples)

    def __contains__(self, object_id: str) -> bool:
        return any(oid == object_id for oid, _ in self.examples)

    def label_of(self, object_id: str) -> Label:
        for oid, y in self.examples:
            if oid == object_id:
                return y
        raise KeyError(object_id)

    @property
    def object_ids(self) -> tuple[str, ...]:
        return tuple(oid for oid, _ in self.examples)

    def with_example(self, object_id: str, label: int) -> "TrainingSet":
        if object_id in self:
            raise ValueError(f"object {object_id!r} is already labeled")
        return TrainingSet(self.examples + ((object_id, check_label(label)),))

    def relabeled(self, new_labels: Mapping[str, int]) -> "TrainingSet":
        return TrainingSet(
            tuple(
                (oid, check_label(new_labels.get(oid, y))) for oid, y in self.examples
            )
        )

    def subset(self, object_ids: Iterable[str]) -> "TrainingSet":
        wanted = set(object_ids)
        return TrainingSet(tuple(p for p in self.examples if p[0] in wanted))


EMPTY_TRAINING_SET = TrainingSet(())


@dataclass(frozen=True)
class TargetOracle:
    """The intended labeling: a total map from object id to label."""

    labeling: Mapping[str, Label]

    def __call__(self, object_id: str) -> Label:
        return self.labeling[object_id]

    def mislabeled(self, training: TrainingSet) -> list[tuple[str, Label, Label]]:
        """All (object_id, given_label, intended_label) disagreements in T."""
        return [
            (oid, y, self.labeling[oid])
            for oid, y in training.examples
            if y != self.labeling[oid]
        ]


@dataclass(frozen=True)
class FeaturizedTrainingSet:
    """Training set mapped into R^p; rows in canonical object-id order."""

    X: np.ndarray  # (n, p) float64
    y: np.ndarray  # (n,) int labels
    object_ids: tuple[str, ...]

    def __post_init__(self):
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    def __len__(self) -> int:
        return len(self.object_ids)

    @property
    def dim(self) -> int:
        return self.X.shape[1]


def eval_feature(feature: FeatureDef, item: Item) -> float:
    """Apply one feature function to one object."""
    return exprlang.evaluate(feature.tree, item.attrs)


def featurize(features: FeatureSet, item: Item) -> np.ndarray:
    """Map an object to its feature vector in R^p (p may be zero)."""
    return np.array([eval_feature(f, item) for f in features.features], dtype=np.float64)


def featurize_training_set(
    features: FeatureSet,
    training: TrainingSet,
    universe: Mapping[str, Item],
) -> FeaturizedTrainingSet:
    """Featurize every labeled example, preserving labels and object ids."""
    n = len(training)
    X = np.empty((n, features.dim), dtype=np.float64)
    y = np.empty(n, dtype=np.int64)
    ids = []
    for i, (oid, label) in enumerate(training.examples):
        X[i] = featurize(features, universe[oid])
        y[i] = label
        ids.append(oid)
    return FeaturizedTrainingSet(X, y, tuple(ids))


def consistent_with(
    classifier: Callable[[Item], Label],
    training: TrainingSet,
    universe: Mapping[str, Item],
) -> bool:
    """True iff the classifier reproduces every label in the training set."""
    return all(classifier(universe[oid]) == y for oid, y in training.examples)
