"""Classify prediction errors into mislabeling / representation / learner /
boundary, as executable decision procedures.

A prediction error is an object the trained classifier labels differently
from the intended labeling. Training-set errors are resolved in a fixed
order: mislabeled examples first, then (labels being correct) either a
learner error when a consistent classifier is learnable, or a
representation error with a concrete non-realizability witness.
Generalization errors are resolved by retraining on the training set
augmented with the correctly labeled object: if that fixes it, it was a
boundary error; otherwise the training-set procedure runs on the
augmented set (mislabeling still scoped to the original training set).

Every verdict is deterministic and carries machine-checkable evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from . import learners, separability
from .domain import (
    FeatureSet,
    FeaturizedTrainingSet,
    Item,
    TargetOracle,
    TrainingSet,
    featurize,
    featurize_training_set,
)
from .learners import Hypothesis, LearnerSpec, LinearHypothesis

MISLABELING = "mislabeling"
REPRESENTATION = "representation"
LEARNER = "learner"
BOUNDARY = "boundary"

OPTIMIZATION = "optimization"
OBJECTIVE = "objective"

CATEGORIES = (MISLABELING, REPRESENTATION, LEARNER, BOUNDARY)

# Learner-error subtype comparison slack and witness-search budget.
LOSS_SLACK = 1e-9
WITNESS_SUBSET_BUDGET = 1_000_000


class UnsupportedLearner(ValueError):
    """No realizability procedure is registered for this learner kind."""


class SolverInconsistency(RuntimeError):
    """Realizability said yes but no consistent hypothesis was produced."""


@dataclass(frozen=True)
class Diagnosis:
    category: str
    learner_subtype: Optional[str]
    evidence: dict
    object_id: str
    hypothesis_before: Hypothesis
    hypothesis_after: Optional[Hypothesis] = None

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if (self.learner_subtype is not None) != (self.category == LEARNER):
            raise ValueError("learner_subtype present iff category is learner")

    def to_doc(self) -> dict:
        doc = {
            "category": self.category,
            "evidence": self.evidence,
            "object_id": self.object_id,
            "hypothesis_before": learners.hypothesis_to_doc(self.hypothesis_before),
        }
        if self.learner_subtype is not None:
            doc["subtype"] = self.learner_subtype
        if self.hypothesis_after is not None:
            doc["hypothesis_after"] = learners.hypothesis_to_doc(self.hypothesis_after)
        return doc


@dataclass(frozen=True)
class RealizabilityReport:
    """Answer to "is any learnable classifier consistent with this data?".

    When not realizable, ``evidence`` holds the reason (a non-separable
    subset or a conflicting collision). When realizable for a linear
    kind, ``consistent_start`` is a hypothesis with zero training errors.
    """

    realizable: bool
    evidence: Optional[dict] = None
    consistent_start: Optional[LinearHypothesis] = None


def _examples_doc(data: FeaturizedTrainingSet, indices) -> list[list]:
    return [[data.object_ids[i], int(data.y[i])] for i in indices]


def _check_linear(data: FeaturizedTrainingSet) -> RealizabilityReport:
    verdict = separability.strictly_separable(
        data.X[data.y == 1], data.X[data.y == 0]
    )
    if verdict.separable:
        return RealizabilityReport(
            True,
            consistent_start=LinearHypothesis(verdict.w, verdict.b),
        )
    try:
        subset = separability.min_nonseparable_subset(
            data.X, data.y, max_subsets=WITNESS_SUBSET_BUDGET
        )
        minimum = True
    except separability.SubsetBudgetExceeded:
        subset = separability.shrink_nonseparable_subset(data.X, data.y)
        minimum = False
    return RealizabilityReport(
        False,
        evidence={
            "kind": "non_separable_subset",
            "examples": _examples_doc(data, subset),
            "minimum_cardinality": minimum,
        },
    )


def _check_memorized(data: FeaturizedTrainingSet) -> RealizabilityReport:
    pairs = separability.collision_pairs(data.X, data.y)
    if not pairs:
        return RealizabilityReport(True)
    i, j = pairs[0]
    return RealizabilityReport(
        False,
        evidence={
            "kind": "conflicting_collision",
            "examples": _examples_doc(data, (i, j)),
        },
    )


RealizabilityCheck = Callable[[FeaturizedTrainingSet], RealizabilityReport]

REALIZABILITY_CHECKS: dict[str, RealizabilityCheck] = {
    learners.LOGREG_ML: _check_linear,
    learners.LOGREG_REG: _check_linear,
    learners.ONE_NN: _check_memorized,
    learners.KNN: _check_memorized,
}


def realizability(spec: LearnerSpec, data: FeaturizedTrainingSet) -> RealizabilityReport:
    check = REALIZABILITY_CHECKS.get(spec.kind)
    if check is None:
        raise UnsupportedLearner(
            f"no realizability procedure registered for learner kind {spec.kind!r}"
        )
    return check(data)


def split_learner_error(
    training: TrainingSet,
    features: FeatureSet,
    spec: LearnerSpec,
    universe: Mapping[str, Item],
) -> tuple[str, dict]:
    """Subdivide a learner error into optimization vs objective.

    Compares the returned hypothesis's penalized loss against the best
    consistent hypothesis found (separability witness refined by
    projected descent). Memorization learners have no loss to trade, so
    their learner errors are objective by definition.

    Returns (subtype, evidence).
    """
    data = featurize_training_set(features, training, universe)
    report = realizability(spec, data)
    if not report.realizable:
        raise ValueError("split_learner_error requires realizable data")
    fitted = learners.fit(spec, data)
    if learners.training_error_count(fitted, data) == 0:
        raise ValueError("split_learner_error requires a fit with training errors")
    if spec.kind in (learners.ONE_NN, learners.KNN):
        return OBJECTIVE, {
            "reason": "memorization learners admit no consistent alternative "
            "inside their hypothesis class"
        }
    if report.consistent_start is None:
        raise SolverInconsistency("realizable but no consistent hypothesis found")
    consistent = learners.minimize_loss_consistent(
        report.consistent_start, data, spec.lam
    )
    if learners.training_error_count(consistent, data) != 0:
        raise SolverInconsistency("consistent hypothesis lost consistency")
    loss_returned = learners.penalized_loss(fitted, data, spec.lam)
    loss_consistent = learners.penalized_loss(consistent, data, spec.lam)
    subtype = OPTIMIZATION if loss_consistent < loss_returned - LOSS_SLACK else OBJECTIVE
    evidence = {
        "loss_returned": loss_returned,
        "loss_consistent": loss_consistent,
        "consistent_hypothesis": learners.hypothesis_to_doc(consistent),
    }
    return subtype, evidence


def classify_training_error(
    training: TrainingSet,
    features: FeatureSet,
    spec: LearnerSpec,
    oracle: TargetOracle,
    universe: Mapping[str, Item],
) -> Optional[Diagnosis]:
    """Diagnose a training-set prediction error; None when there is none."""
    data = featurize_training_set(features, training, universe)
    fitted = learners.fit(spec, data)
    return _classify_training_error_fitted(
        training, data, fitted, features, spec, oracle, universe,
        mislabel_scope=training,
    )


def _classify_training_error_fitted(
    training: TrainingSet,
    data: FeaturizedTrainingSet,
    fitted: Hypothesis,
    features: FeatureSet,
    spec: LearnerSpec,
    oracle: TargetOracle,
    universe: Mapping[str, Item],
    mislabel_scope: TrainingSet,
) -> Optional[Diagnosis]:
    error_ids = [
        data.object_ids[i]
        for i in range(len(data))
        if learners.predict(fitted, data.X[i]) != oracle(data.object_ids[i])
    ]
    if not error_ids:
        return None
    mislabeled = oracle.mislabeled(mislabel_scope)
    if mislabeled:
        return Diagnosis(
            MISLABELING,
            None,
            {
                "mislabeled": [
                    {"object_id": oid, "given": given, "intended": intended}
                    for oid, given, intended in mislabeled
                ]
            },
            error_ids[0],
            fitted,
        )
    report = realizability(spec, data)
    if report.realizable:
        subtype, evidence = split_learner_error(training, features, spec, universe)
        return Diagnosis(LEARNER, subtype, evidence, error_ids[0], fitted)
    return Diagnosis(REPRESENTATION, None, report.evidence, error_ids[0], fitted)


def classify_prediction_error(
    object_id: str,
    training: TrainingSet,
    features: FeatureSet,
    spec: LearnerSpec,
    oracle: TargetOracle,
    universe: Mapping[str, Item],
) -> Optional[Diagnosis]:
    """Diagnose a prediction error on any object; None when there is none.

    Training-set objects go through the training-error procedure. For a
    held-out object the training set is augmented with the correctly
    labeled object and the learner retrained: a now-consistent classifier
    means a boundary error, otherwise the training-error procedure runs
    on the augmented set with mislabeling still judged against the
    original training set only.
    """
    data = featurize_training_set(features, training, universe)
    fitted = learners.fit(spec, data)
    vec = featurize(features, universe[object_id])
    if learners.predict(fitted, vec) == oracle(object_id):
        return None
    if object_id in training:
        return _classify_training_error_fitted(
            training, data, fitted, features, spec, oracle, universe,
            mislabel_scope=training,
        )
    augmented = training.with_example(object_id, oracle(object_id))
    aug_data = featurize_training_set(features, augmented, universe)
    refitted = learners.fit(spec, aug_data)
    if learners.training_error_count(refitted, aug_data) == 0:
        return Diagnosis(
            BOUNDARY,
            None,
            {"added_example": [object_id, oracle(object_id)]},
            object_id,
            fitted,
            hypothesis_after=refitted,
        )
    return _classify_training_error_fitted(
        augmented, aug_data, refitted, features, spec, oracle, universe,
        mislabel_scope=training,
    )
