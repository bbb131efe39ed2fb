from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teachbench import separability as sep


def arr(points):
    a = np.asarray(points, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(len(a), 1)
    return a


XOR_POINTS = arr([[0, 0], [0, 1], [1, 0], [1, 1]])
XOR_LABELS = np.array([0, 1, 1, 0])


def test_singletons_five_vs_seven_separable():
    verdict = sep.strictly_separable(arr([[5.0]]), arr([[7.0]]))
    assert verdict.separable
    assert verdict.w @ [5.0] + verdict.b >= 1 - 1e-6
    assert verdict.w @ [7.0] + verdict.b <= -1 + 1e-6


def test_xor_not_separable():
    verdict = sep.strictly_separable(
        XOR_POINTS[XOR_LABELS == 1], XOR_POINTS[XOR_LABELS == 0]
    )
    assert not verdict.separable
    assert verdict.w is None


def test_shared_point_defeats_strict_separation():
    p = arr([[1.0, 2.0]])
    assert not sep.strictly_separable(p, p).separable


def test_empty_side_separable_by_convention():
    assert sep.strictly_separable(np.zeros((0, 2)), arr([[1.0, 1.0]])).separable
    assert sep.strictly_separable(arr([[1.0, 1.0]]), np.zeros((0, 2))).separable


def test_zero_dimensional_points():
    # nonempty classes share the unique 0-d point: never strictly separable
    assert not sep.strictly_separable(np.zeros((2, 0)), np.zeros((1, 0))).separable


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        sep.strictly_separable(arr([[1.0, 2.0]]), arr([[1.0]]))


def test_hulls_intersect_xor():
    # the square's diagonals cross at (0.5, 0.5)
    assert sep.hulls_intersect(
        XOR_POINTS[XOR_LABELS == 1], XOR_POINTS[XOR_LABELS == 0]
    )


def test_hulls_disjoint_singletons():
    assert not sep.hulls_intersect(arr([[0.0]]), arr([[1.0]]))


def test_hulls_identical_singletons():
    assert sep.hulls_intersect(arr([[2.0, 3.0]]), arr([[2.0, 3.0]]))


def test_hull_check_size_cap():
    many = arr(np.zeros((13, 2)))
    with pytest.raises(ValueError, match="capped"):
        sep.hulls_intersect(many[:7], many[7:])
    with pytest.raises(ValueError, match="capped"):
        sep.hulls_intersect(np.zeros((1, 4)), np.ones((1, 4)))


def test_witness_margins_on_random_separable_sets():
    rng = np.random.default_rng(11)
    for _ in range(25):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(2, 9))
        u = rng.normal(size=d)
        u /= np.linalg.norm(u)
        pts = rng.normal(size=(n, d)) * rng.uniform(0.5, 20.0)
        labels = rng.integers(0, 2, size=n)
        labels[0], labels[1] = 1, 0
        for i in range(n):
            s = u @ pts[i]
            want = (1.0 if labels[i] else -1.0) * (0.05 + abs(rng.normal()))
            pts[i] += (want - s) * u
        verdict = sep.strictly_separable(pts[labels == 1], pts[labels == 0])
        assert verdict.separable
        margins = pts @ verdict.w + verdict.b
        assert np.all(margins[labels == 1] >= 1 - 1e-6)
        assert np.all(margins[labels == 0] <= -1 + 1e-6)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.booleans()),
        min_size=2,
        max_size=10,
    )
)
def test_separability_is_symmetric(points):
    pts = arr([[float(a), float(b)] for a, b, _ in points])
    labels = np.array([1 if flag else 0 for _, _, flag in points])
    pos, neg = pts[labels == 1], pts[labels == 0]
    assert (
        sep.strictly_separable(pos, neg).separable
        == sep.strictly_separable(neg, pos).separable
    )


def test_lp_agrees_with_hull_oracle_on_random_instances():
    rng = np.random.default_rng(5)
    disagreements = 0
    for _ in range(60):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(2, 13))
        pts = rng.normal(size=(n, d))
        if rng.random() < 0.5:
            pts = np.round(pts)  # grid data provokes hull contact and collisions
        labels = rng.integers(0, 2, size=n)
        lp = sep.strictly_separable(pts[labels == 1], pts[labels == 0]).separable
        hull = sep.hulls_intersect(pts[labels == 1], pts[labels == 0])
        disagreements += lp != (not hull)
    assert disagreements == 0


def test_xor_witness_is_all_four_and_three_subsets_split():
    witness = sep.min_nonseparable_subset(XOR_POINTS, XOR_LABELS)
    assert witness == [0, 1, 2, 3]
    for idx in combinations(range(4), 3):
        subset = XOR_POINTS[list(idx)]
        labels = XOR_LABELS[list(idx)]
        assert sep.strictly_separable(
            subset[labels == 1], subset[labels == 0]
        ).separable


def test_witness_none_for_separable():
    pts = arr([[0.0], [1.0]])
    assert sep.min_nonseparable_subset(pts, np.array([0, 1])) is None


def test_witness_size_two_for_coincident_conflict():
    pts = arr([[3.0, 3.0], [3.0, 3.0], [9.0, 9.0]])
    labels = np.array([1, 0, 1])
    assert sep.min_nonseparable_subset(pts, labels) == [0, 1]


def test_witness_within_dimension_bound_and_minimum():
    rng = np.random.default_rng(23)
    for _ in range(30):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(2, 10))
        pts = np.round(rng.normal(size=(n, d)) * 1.5)
        labels = rng.integers(0, 2, size=n)
        witness = sep.min_nonseparable_subset(pts, labels)
        if witness is None:
            continue
        assert len(witness) <= d + 2
        # minimum cardinality: every smaller subset is separable
        for size in range(2, len(witness)):
            for idx in combinations(range(n), size):
                subset = pts[list(idx)]
                sub_labels = labels[list(idx)]
                assert sep.strictly_separable(
                    subset[sub_labels == 1], subset[sub_labels == 0]
                ).separable


def test_witness_budget_raises():
    pts = np.vstack([XOR_POINTS, XOR_POINTS + 5.0])
    labels = np.concatenate([XOR_LABELS, XOR_LABELS])
    with pytest.raises(sep.SubsetBudgetExceeded):
        sep.min_nonseparable_subset(pts, labels, max_subsets=3)


def test_shrink_gives_inclusion_minimal_witness():
    pts = np.vstack([arr([[9.0, 9.0], [-9.0, 4.0]]), XOR_POINTS])
    labels = np.array([1, 0, 0, 1, 1, 0])
    witness = sep.shrink_nonseparable_subset(pts, labels)
    assert witness is not None and len(witness) <= 4
    sub = pts[witness]
    sub_labels = labels[witness]
    assert not sep.strictly_separable(
        sub[sub_labels == 1], sub[sub_labels == 0]
    ).separable
    for drop in range(len(witness)):
        rest = [witness[i] for i in range(len(witness)) if i != drop]
        rest_pts, rest_labels = pts[rest], labels[rest]
        assert sep.strictly_separable(
            rest_pts[rest_labels == 1], rest_pts[rest_labels == 0]
        ).separable


def test_collision_pairs():
    pts = arr([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0], [1.0, 1.0]])
    labels = np.array([0, 1, 0, 0])
    assert sep.collision_pairs(pts, labels) == [(0, 1), (1, 3)]
    assert sep.collision_pairs(pts, np.array([0, 0, 0, 0])) == []


def test_subset_search_space():
    assert sep.subset_search_space(4, 4) == 6 + 4 + 1
    assert sep.subset_search_space(10, 2) == 45
