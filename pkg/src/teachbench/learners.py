"""Vector learning algorithms and their hypotheses.

Four learner kinds: maximum-likelihood logistic regression (consistent on
any strictly separable training set, enforced constructively), norm-
penalized logistic regression (inconsistent for lam > 0), one-nearest-
neighbor (consistent absent conflicting collisions), and k-nearest-
neighbor for odd k > 1 (inconsistent).

The logistic objective is sum_i softplus(z_i) - y_i z_i + lam*||w||_2 with
the (unsquared) Euclidean norm penalty. Prediction thresholds at
probability 0.5 with ties going to label 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

import numpy as np

from . import _kernels, separability
from .domain import FeatureSet, FeaturizedTrainingSet, Item, Label, featurize

LOGREG_ML = "logreg-ml"
LOGREG_REG = "logreg-reg"
ONE_NN = "1nn"
KNN = "knn"

ALL_KINDS = (LOGREG_ML, LOGREG_REG, ONE_NN, KNN)
CONSISTENT_KINDS = (LOGREG_ML, ONE_NN)
LINEAR_KINDS = (LOGREG_ML, LOGREG_REG)

# Scale applied to a margin-1 separating hyperplane when the optimizer's
# thresholded output still has training errors on separable data.
FALLBACK_SCALE = 1e4


class OptimizerDivergence(RuntimeError):
    """The descent iteration produced a non-finite loss or gradient."""


@dataclass(frozen=True)
class LearnerSpec:
    """Which learner to run, plus its optimizer budget.

    lam must be 0 for logreg-ml and positive for logreg-reg; k must be 1
    for 1nn and an odd value > 1 for knn. ``consistency_fallback`` exists
    so tests can observe the raw optimizer output on separable data.
    """

    kind: str
    lam: float = 0.0
    k: int = 1
    max_iters: int = 10_000
    tol: float = 1e-8
    consistency_fallback: bool = True

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown learner kind {self.kind!r}")
        if self.kind == LOGREG_ML and self.lam != 0.0:
            raise ValueError("logreg-ml requires lam = 0")
        if self.kind == LOGREG_REG and self.lam <= 0.0:
            raise ValueError("logreg-reg requires lam > 0")
        if self.kind == ONE_NN and self.k != 1:
            raise ValueError("1nn requires k = 1")
        if self.kind == KNN and (self.k <= 1 or self.k % 2 == 0):
            raise ValueError("knn requires odd k > 1")

    @classmethod
    def logreg_ml(cls, **kw) -> "LearnerSpec":
        return cls(LOGREG_ML, **kw)

    @classmethod
    def logreg_reg(cls, lam: float, **kw) -> "LearnerSpec":
        return cls(LOGREG_REG, lam=lam, **kw)

    @classmethod
    def one_nn(cls) -> "LearnerSpec":
        return cls(ONE_NN)

    @classmethod
    def knn(cls, k: int) -> "LearnerSpec":
        return cls(KNN, k=k)

    @property
    def is_consistent_kind(self) -> bool:
        return self.kind in CONSISTENT_KINDS

    @property
    def is_linear_kind(self) -> bool:
        return self.kind in LINEAR_KINDS


@dataclass(frozen=True)
class LinearHypothesis:
    """Hyperplane classifier: label 1 iff w@v + b > 0."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if not (np.all(np.isfinite(w)) and np.isfinite(self.b)):
            raise ValueError("hypothesis parameters must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class MemorizedHypothesis:
    """k-nearest-neighbor over a memorized featurized training set.

    Rows mapped to an identical point collapse to the canonical (lowest
    object-id) row before neighbors are ranked. An empty memorized set
    predicts 0 everywhere, mirroring the empty linear fit.
    """

    rows: FeaturizedTrainingSet
    k: int


Hypothesis = Union[LinearHypothesis, MemorizedHypothesis]


def fit(spec: LearnerSpec, data: FeaturizedTrainingSet) -> Hypothesis:
    """Train a hypothesis on a featurized training set.

    For the logistic learners, runs full-batch gradient descent with
    backtracking line search under the spec's budget. For logreg-ml the
    result is made consistent whenever the data is strictly separable: if
    thresholded predictions still err, the separability witness scaled by
    FALLBACK_SCALE is returned instead.

    Raises:
        OptimizerDivergence: If the descent produces non-finite values.
    """
    if spec.kind in (ONE_NN, KNN):
        return MemorizedHypothesis(data, spec.k)

    if len(data) == 0:
        return LinearHypothesis(np.zeros(data.dim), 0.0)

    w, b, status = _kernels.logreg_gd(
        data.X, data.y.astype(np.float64), spec.lam, spec.max_iters, spec.tol
    )
    if status == _kernels.DIVERGED:
        raise OptimizerDivergence("logistic descent diverged to non-finite values")
    hypothesis = LinearHypothesis(w, float(b))

    if (
        spec.kind == LOGREG_ML
        and spec.consistency_fallback
        and training_error_count(hypothesis, data) > 0
    ):
        verdict = separability.strictly_separable(
            data.X[data.y == 1], data.X[data.y == 0]
        )
        if verdict.separable:
            hypothesis = LinearHypothesis(
                verdict.w * FALLBACK_SCALE, verdict.b * FALLBACK_SCALE
            )
    return hypothesis


def predict(hypothesis: Hypothesis, v: np.ndarray) -> Label:
    """Classify one feature vector; deterministic, ties go to 0."""
    v = np.asarray(v, dtype=np.float64)
    if isinstance(hypothesis, LinearHypothesis):
        if v.shape != hypothesis.w.shape:
            raise ValueError(
                f"dimension mismatch: vector {v.shape} vs weights {hypothesis.w.shape}"
            )
        return int(hypothesis.w @ v + hypothesis.b > 0.0)
    return _predict_memorized(hypothesis, v)


def _predict_memorized(hypothesis: MemorizedHypothesis, v: np.ndarray) -> Label:
    rows = hypothesis.rows
    if len(rows) == 0:
        return 0
    if v.shape[0] != rows.dim:
        raise ValueError(
            f"dimension mismatch: vector {v.shape} vs rows of dim {rows.dim}"
        )
    # Collapse coincident rows to the canonical lowest-id one (rows are in
    # id order, so the first occurrence wins).
    seen: set[bytes] = set()
    keep = []
    for i in range(len(rows)):
        key = rows.X[i].tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    X = rows.X[keep]
    y = rows.y[keep]
    dists = np.linalg.norm(X - v, axis=1)
    order = np.argsort(dists, kind="stable")
    m = min(hypothesis.k, len(order))
    votes = y[order[:m]]
    ones = int(votes.sum())
    if ones * 2 == m:  # only possible when fewer rows than k
        return int(y[order[0]])
    return int(ones * 2 > m)


def as_item_classifier(
    hypothesis: Hypothesis, features: FeatureSet
) -> Callable[[Item], Label]:
    """Compose a hypothesis with a feature set into a classifier of objects."""

    def classify(item: Item) -> Label:
        return predict(hypothesis, featurize(features, item))

    return classify


def training_error_ids(
    hypothesis: Hypothesis, data: FeaturizedTrainingSet
) -> list[str]:
    """Object ids of rows whose prediction disagrees with their label."""
    return [
        data.object_ids[i]
        for i in range(len(data))
        if predict(hypothesis, data.X[i]) != data.y[i]
    ]


def training_error_count(hypothesis: Hypothesis, data: FeaturizedTrainingSet) -> int:
    return len(training_error_ids(hypothesis, data))


def penalized_loss(
    hypothesis: LinearHypothesis, data: FeaturizedTrainingSet, lam: float
) -> float:
    """Negative log-likelihood plus lam*||w||_2, evaluated stably."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    z = data.X @ hypothesis.w + hypothesis.b
    nll = float(
        np.sum(np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))) - data.y * z)
    )
    return nll + lam * float(np.linalg.norm(hypothesis.w))


def penalized_loss_grad(
    hypothesis: LinearHypothesis, data: FeaturizedTrainingSet, lam: float
) -> tuple[np.ndarray, float]:
    """Gradient of penalized_loss in (w, b); penalty subgradient 0 at w=0."""
    z = data.X @ hypothesis.w + hypothesis.b
    s = _sigmoid(z)
    gw = data.X.T @ (s - data.y)
    gb = float(np.sum(s - data.y))
    wnorm = float(np.linalg.norm(hypothesis.w))
    if lam > 0 and wnorm > 0:
        gw = gw + lam * hypothesis.w / wnorm
    return gw, gb


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def minimize_loss_consistent(
    start: LinearHypothesis,
    data: FeaturizedTrainingSet,
    lam: float,
    max_iters: int = 200,
) -> LinearHypothesis:
    """Descend penalized_loss while keeping zero training errors.

    Projected descent: a step is accepted only if it both decreases the
    loss and leaves every training row correctly classified. ``start``
    must already be consistent with the data.
    """
    if training_error_count(start, data) != 0:
        raise ValueError("starting hypothesis is not consistent with the data")
    w = np.array(start.w)
    b = float(start.b)
    current = penalized_loss(start, data, lam)
    step = 1.0
    for _ in range(max_iters):
        gw, gb = penalized_loss_grad(LinearHypothesis(w, b), data, lam)
        gnorm2 = float(gw @ gw) + gb * gb
        if gnorm2 <= 1e-16:
            break
        step = min(step * 2.0, 1e6)
        accepted = False
        while step >= 1e-16:
            cand = LinearHypothesis(w - step * gw, b - step * gb)
            value = penalized_loss(cand, data, lam)
            if (
                value <= current - 1e-4 * step * gnorm2
                and training_error_count(cand, data) == 0
            ):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        w = np.array(cand.w)
        b = float(cand.b)
        current = value
    return LinearHypothesis(w, b)


def signed_distance(hypothesis: LinearHypothesis, v: np.ndarray) -> float:
    """Signed Euclidean distance from v to the decision hyperplane."""
    wnorm = float(np.linalg.norm(hypothesis.w))
    if wnorm == 0.0:
        raise ValueError("signed distance undefined: zero weight vector")
    return float((hypothesis.w @ np.asarray(v, dtype=np.float64) + hypothesis.b) / wnorm)


def hypothesis_to_doc(hypothesis: Hypothesis) -> dict:
    """JSON-ready document: {kind, w, b} or {kind, k, rows}."""
    if isinstance(hypothesis, LinearHypothesis):
        return {
            "kind": "linear",
            "w": [float(x) for x in hypothesis.w],
            "b": float(hypothesis.b),
        }
    return {
        "kind": "memorized",
        "k": hypothesis.k,
        "rows": [
            {
                "v": [float(x) for x in hypothesis.rows.X[i]],
                "label": int(hypothesis.rows.y[i]),
                "object_id": hypothesis.rows.object_ids[i],
            }
            for i in range(len(hypothesis.rows))
        ],
    }


def hypothesis_from_doc(doc: Mapping) -> Hypothesis:
    if doc["kind"] == "linear":
        return LinearHypothesis(np.array(doc["w"], dtype=np.float64), float(doc["b"]))
    if doc["kind"] == "memorized":
        rows = doc["rows"]
        X = np.array([r["v"] for r in rows], dtype=np.float64).reshape(len(rows), -1)
        y = np.array([r["label"] for r in rows], dtype=np.int64)
        ids = tuple(r["object_id"] for r in rows)
        return MemorizedHypothesis(FeaturizedTrainingSet(X, y, ids), int(doc["k"]))
    raise ValueError(f"unknown hypothesis kind {doc.get('kind')!r}")


def line_boundary_points(
    hypothesis: LinearHypothesis,
    bounds: tuple[float, float, float, float],
    samples: int = 50,
) -> list[list[float]] | None:
    """Sample the 2-D decision line inside a bounding rectangle.

    Returns ``samples`` points along the segment where w@v + b = 0 crosses
    the rectangle (x_min, x_max, y_min, y_max), or None when the weight
    vector is (near) zero or the line misses the rectangle.
    """
    if hypothesis.w.shape != (2,):
        raise ValueError("line boundary requires a 2-D hypothesis")
    w1, w2 = float(hypothesis.w[0]), float(hypothesis.w[1])
    b = float(hypothesis.b)
    scale = max(abs(w1), abs(w2))
    if scale <= 0.0:
        return None
    x_min, x_max, y_min, y_max = bounds
    crossings = []
    if abs(w2) > 1e-12 * scale:
        for x in (x_min, x_max):
            y = -(w1 * x + b) / w2
            if y_min - 1e-9 <= y <= y_max + 1e-9:
                crossings.append((x, y))
    if abs(w1) > 1e-12 * scale:
        for y in (y_min, y_max):
            x = -(w2 * y + b) / w1
            if x_min - 1e-9 <= x <= x_max + 1e-9:
                crossings.append((x, y))
    unique: list[tuple[float, float]] = []
    for c in crossings:
        if not any(abs(c[0] - u[0]) < 1e-9 and abs(c[1] - u[1]) < 1e-9 for u in unique):
            unique.append(c)
    if len(unique) < 2:
        return None
    unique.sort()
    (x0, y0), (x1, y1) = unique[0], unique[-1]
    ts = np.linspace(0.0, 1.0, samples)
    return [[float(x0 + t * (x1 - x0)), float(y0 + t * (y1 - y0))] for t in ts]
