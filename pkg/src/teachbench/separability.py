"""Strict linear separability, convex-hull cross-check, witness search.

``strictly_separable`` answers via a phase-1 simplex over margin
constraints (authored here, backed by the kernel backends);
``hulls_intersect`` is the independent small-scale oracle and goes through
scipy's LP instead, so the two routes share no solver code.
``min_nonseparable_subset`` realizes the at-most-(d+2)-point witness bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from . import _kernels

LP_TOL = 1e-9
_MAX_PIVOTS = 100_000

HULL_CHECK_MAX_POINTS = 12
HULL_CHECK_MAX_DIM = 3


class SubsetBudgetExceeded(RuntimeError):
    """Exact subset enumeration would exceed its budget; use greedy mode."""


def _as_point_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1 and arr.shape[0] == 0:
        return arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ValueError(f"expected an (n, d) point array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Outcome of a strict-separation query.

    When ``separable``, (w, b) satisfy w@p + b >= 1 for every positive
    point and w@q + b <= -1 for every negative one, up to solver
    tolerance, in the original (unscaled) coordinates.
    """

    separable: bool
    w: Optional[np.ndarray] = None
    b: Optional[float] = None

    def __post_init__(self):
        if self.separable == (self.w is None):
            raise ValueError("witness must be present exactly when separable")


def strictly_separable(pos: np.ndarray, neg: np.ndarray) -> SeparabilityVerdict:
    """Decide whether two finite point sets are strictly linearly separable.

    Args:
        pos: (n_pos, d) points that must fall on the positive side.
        neg: (n_neg, d) points for the negative side. Either set may be
            empty, in which case the answer is separable by convention.

    Returns:
        A verdict with a margin-1 witness when separable.

    Raises:
        ValueError: On dimension mismatch.
    """
    pos = _as_point_array(pos)
    neg = _as_point_array(neg)
    if len(pos) and len(neg) and pos.shape[1] != neg.shape[1]:
        raise ValueError(
            f"dimension mismatch: {pos.shape[1]} vs {neg.shape[1]}"
        )
    d = pos.shape[1] if len(pos) else neg.shape[1]
    if len(pos) == 0 or len(neg) == 0:
        b = 2.0 if len(neg) == 0 else -2.0
        return SeparabilityVerdict(True, np.zeros(d), b)

    # Rescale to the unit bounding box for conditioning; the witness is
    # mapped back to original coordinates afterwards (exact algebra).
    allpts = np.vstack([pos, neg])
    lo = allpts.min(axis=0)
    span = allpts.max(axis=0) - lo
    span[span == 0.0] = 1.0
    pos_s = (pos - lo) / span
    neg_s = (neg - lo) / span

    # Rows a_i = (x_i, 1) for positives and -(x_i, 1) for negatives encode
    # a_i @ (w, b) >= 1.
    A = np.empty((len(pos) + len(neg), d + 1))
    A[: len(pos), :d] = pos_s
    A[: len(pos), d] = 1.0
    A[len(pos) :, :d] = -neg_s
    A[len(pos) :, d] = -1.0

    status, violation, x = _kernels.margin_lp(A, LP_TOL, _MAX_PIVOTS)
    if status != _kernels.LP_OK:
        raise RuntimeError("separability LP exceeded its pivot budget")
    if violation > LP_TOL * A.shape[0]:
        return SeparabilityVerdict(False)
    w_scaled, b_scaled = x[:d], x[d]
    w = w_scaled / span
    b = b_scaled - float(w_scaled @ (lo / span))
    return SeparabilityVerdict(True, w, float(b))


def hulls_intersect(pos: np.ndarray, neg: np.ndarray) -> bool:
    """Brute-force oracle: do the convex hulls of the two sets intersect?

    Decided by LP feasibility of a common convex combination via scipy,
    deliberately independent of the simplex used by ``strictly_separable``.
    Only intended for test-scale instances.

    Raises:
        ValueError: If the documented size cap (12 points, 3 dims) is
            exceeded, or on dimension mismatch.
    """
    from scipy.optimize import linprog

    pos = _as_point_array(pos)
    neg = _as_point_array(neg)
    if len(pos) == 0 or len(neg) == 0:
        return False
    if pos.shape[1] != neg.shape[1]:
        raise ValueError(
            f"dimension mismatch: {pos.shape[1]} vs {neg.shape[1]}"
        )
    d = pos.shape[1]
    if len(pos) + len(neg) > HULL_CHECK_MAX_POINTS or d > HULL_CHECK_MAX_DIM:
        raise ValueError(
            f"hull check capped at {HULL_CHECK_MAX_POINTS} points and "
            f"{HULL_CHECK_MAX_DIM} dims, got {len(pos) + len(neg)} points in R^{d}"
        )

    np_, nn = len(pos), len(neg)
    # Variables (lambda, mu): sum lambda_i pos_i = sum mu_j neg_j,
    # sum lambda = 1, sum mu = 1, all >= 0.
    a_eq = np.zeros((d + 2, np_ + nn))
    a_eq[:d, :np_] = pos.T
    a_eq[:d, np_:] = -neg.T
    a_eq[d, :np_] = 1.0
    a_eq[d + 1, np_:] = 1.0
    b_eq = np.zeros(d + 2)
    b_eq[d] = 1.0
    b_eq[d + 1] = 1.0
    result = linprog(
        c=np.zeros(np_ + nn), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    return bool(result.status == 0)


def min_nonseparable_subset(
    points: np.ndarray,
    labels: np.ndarray,
    max_subsets: Optional[int] = None,
) -> Optional[list[int]]:
    """Minimum-cardinality witness of non-separability, or None.

    If the full labeled point set is not strictly separable, returns
    indices of a smallest subset whose classes are still not separable
    (never more than d+2 indices). Subsets are enumerated by increasing
    size, lexicographically within a size, so the answer is deterministic.

    Args:
        points: (m, d) array.
        labels: (m,) array of 0/1.
        max_subsets: Optional cap on feasibility tests; exceeding it
            raises SubsetBudgetExceeded.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    m, d = points.shape
    if strictly_separable(points[labels == 1], points[labels == 0]).separable:
        return None

    tested = 0
    for size in range(2, min(d + 2, m) + 1):
        for subset in combinations(range(m), size):
            tested += 1
            if max_subsets is not None and tested > max_subsets:
                raise SubsetBudgetExceeded(
                    f"witness enumeration exceeded {max_subsets} subsets"
                )
            idx = list(subset)
            sub_labels = labels[idx]
            sub_points = points[idx]
            verdict = strictly_separable(
                sub_points[sub_labels == 1], sub_points[sub_labels == 0]
            )
            if not verdict.separable:
                return idx
    raise RuntimeError(
        "non-separable set had no witness within d+2 points; solver bug"
    )


def shrink_nonseparable_subset(
    points: np.ndarray, labels: np.ndarray
) -> Optional[list[int]]:
    """Inclusion-minimal (not necessarily minimum) non-separability witness.

    Deletion filter: drop points whose removal keeps the set non-separable.
    Linear in the number of points, and the result still has at most d+2
    members because any larger set contains a smaller non-separable subset.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    keep = list(range(len(points)))
    if strictly_separable(points[labels == 1], points[labels == 0]).separable:
        return None
    for i in list(keep):
        trial = [j for j in keep if j != i]
        pts = points[trial]
        labs = labels[trial]
        if not strictly_separable(pts[labs == 1], pts[labs == 0]).separable:
            keep = trial
    return keep


def subset_search_space(m: int, max_size: int) -> int:
    """Number of subsets an exact enumeration up to max_size would test."""
    return sum(comb(m, s) for s in range(2, min(max_size, m) + 1))


def collision_pairs(
    points: np.ndarray, labels: np.ndarray
) -> list[tuple[int, int]]:
    """Index pairs mapped to identical vectors but carrying different labels."""
    points = np.asarray(points, dtype=np.float64)
    seen: dict[bytes, list[int]] = {}
    for i in range(len(points)):
        seen.setdefault(points[i].tobytes(), []).append(i)
    pairs = []
    for group in seen.values():
        for i, j in combinations(group, 2):
            if labels[i] != labels[j]:
                pairs.append((i, j))
    return sorted(pairs)
