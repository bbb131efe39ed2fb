"""Minimal sub-training-sets that already defeat the learner.

An invalidation set is a subset of the training set on which the trained
classifier still commits a prediction error on the subset's own examples;
presenting one focuses the teacher's attention when deciding between a
bad label and a missing feature. For the learners here that is exactly a
non-realizable subset: classes that cannot be strictly separated (linear
kinds, never more than |F|+2 examples) or an identical-point label
conflict (nearest-neighbor kinds, never more than 2).

Exact mode enumerates subsets by increasing size (lexicographic by object
id within a size) and is minimum-cardinality; greedy mode deletion-
filters the whole set and is only inclusion-minimal, which the result
flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Optional

import numpy as np

from . import learners, separability
from .domain import (
    FeatureSet,
    Item,
    TrainingSet,
    featurize_training_set,
)
from .learners import LearnerSpec

DEFAULT_SUBSET_BUDGET = 1_000_000

EXACT = "exact"
GREEDY = "greedy"


class SubsetBudgetExceeded(RuntimeError):
    """Exact enumeration went past its subset budget; advise greedy mode."""


@dataclass(frozen=True)
class InvalidationResult:
    subset: TrainingSet
    mode: str
    minimum: bool  # exact mode: smallest possible; greedy: only inclusion-minimal
    bound: int  # |F|+2 for linear kinds, 2 for nearest-neighbor kinds

    @property
    def cardinality(self) -> int:
        return len(self.subset)

    def to_doc(self) -> dict:
        return {
            "examples": [[oid, int(y)] for oid, y in self.subset.examples],
            "cardinality": self.cardinality,
            "bound": self.bound,
            "bound_ok": self.cardinality <= self.bound,
            "mode": self.mode,
            "minimum": self.minimum,
        }


def size_bound(spec: LearnerSpec, features: FeatureSet) -> int:
    return 2 if spec.kind in (learners.ONE_NN, learners.KNN) else features.dim + 2


def rows_nonrealizable(
    spec: LearnerSpec, X: np.ndarray, y: np.ndarray
) -> bool:
    if spec.kind in (learners.ONE_NN, learners.KNN):
        return bool(separability.collision_pairs(X, y))
    return not separability.strictly_separable(X[y == 1], X[y == 0]).separable


def find_invalidation_set(
    training: TrainingSet,
    features: FeatureSet,
    spec: LearnerSpec,
    universe: Mapping[str, Item],
    mode: str = EXACT,
    max_subsets: int = DEFAULT_SUBSET_BUDGET,
) -> Optional[InvalidationResult]:
    """Find a minimal training subset the learner cannot fit.

    Returns None when the trained classifier has no training error, or
    when it errs without any non-realizable subset existing (possible
    only for the inconsistent learner kinds).

    Raises:
        SubsetBudgetExceeded: In exact mode once more than ``max_subsets``
            subsets have been tested; retry with mode="greedy".
    """
    if mode not in (EXACT, GREEDY):
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    data = featurize_training_set(features, training, universe)
    fitted = learners.fit(spec, data)
    if learners.training_error_count(fitted, data) == 0:
        return None

    bound = size_bound(spec, features)
    n = len(data)
    if mode == GREEDY:
        if not rows_nonrealizable(spec, data.X, data.y):
            return None
        keep = list(range(n))
        for i in list(keep):
            trial = [j for j in keep if j != i]
            if rows_nonrealizable(spec, data.X[trial], data.y[trial]):
                keep = trial
        return InvalidationResult(
            subset=training.subset(data.object_ids[i] for i in keep),
            mode=GREEDY,
            minimum=False,
            bound=bound,
        )

    tested = 0
    for size in range(2, min(bound, n) + 1):
        for idx in combinations(range(n), size):
            tested += 1
            if tested > max_subsets:
                raise SubsetBudgetExceeded(
                    f"exact search exceeded {max_subsets} subsets; "
                    "use greedy mode"
                )
            rows = list(idx)
            if rows_nonrealizable(spec, data.X[rows], data.y[rows]):
                return InvalidationResult(
                    subset=training.subset(data.object_ids[i] for i in rows),
                    mode=EXACT,
                    minimum=True,
                    bound=bound,
                )
    return None


def verify_invalidation(
    subset: TrainingSet,
    features: FeatureSet,
    spec: LearnerSpec,
    universe: Mapping[str, Item],
) -> bool:
    """Checkable post-condition: does a fit on the subset misclassify it?"""
    data = featurize_training_set(features, subset, universe)
    fitted = learners.fit(spec, data)
    return learners.training_error_count(fitted, data) > 0
