"""Deterministic fixture generators and scenario-file ingestion.

A scenario bundles an object universe, the intended labeling, a declared
pool of teachable features, and initial training/feature selections.
Generators are pure functions of their arguments (PCG64 via
``numpy.random.default_rng`` where randomness is involved), so fixtures
are reproducible byte-for-byte.

Scenario file format (JSON, UTF-8)::

    {
      "objects": [{"id": ..., "attrs": {name: number}}, ...],
      "target": {object-id: 0|1},
      "feature_pool": [{"id": ..., "expr": ...}, ...],
      "initial_training": [[object-id, label], ...],
      "initial_features": [feature-id, ...]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from . import exprlang
from .domain import (
    FeatureDef,
    FeatureSet,
    Item,
    TargetOracle,
    TrainingSet,
)


class ScenarioError(ValueError):
    """A scenario file or scenario construction is invalid."""


@dataclass(frozen=True)
class Scenario:
    universe: Mapping[str, Item]
    oracle: TargetOracle
    pool: tuple[FeatureDef, ...]
    initial_training: TrainingSet
    initial_features: tuple[str, ...]
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        attr_keys = None
        for oid, item in self.universe.items():
            if oid != item.id:
                raise ScenarioError(f"universe key {oid!r} != object id {item.id!r}")
            keys = frozenset(item.attrs)
            if attr_keys is None:
                attr_keys = keys
            elif keys != attr_keys:
                raise ScenarioError(
                    f"object {oid!r} declares attributes {sorted(keys)}, "
                    f"expected {sorted(attr_keys)}"
                )
        for oid in self.universe:
            if oid not in self.oracle.labeling:
                raise ScenarioError(f"target labeling missing object {oid!r}")
        pool_ids = [f.id for f in self.pool]
        if len(set(pool_ids)) != len(pool_ids):
            raise ScenarioError(f"duplicate feature ids in pool: {pool_ids}")
        if attr_keys is not None:
            for f in self.pool:
                unknown = f.attr_names() - attr_keys
                if unknown:
                    raise ScenarioError(
                        f"feature {f.id!r} references unknown attribute "
                        f"{sorted(unknown)[0]!r}"
                    )
        for fid in self.initial_features:
            if fid not in pool_ids:
                raise ScenarioError(f"initial feature {fid!r} not in pool")
        for oid, _ in self.initial_training.examples:
            if oid not in self.universe:
                raise ScenarioError(f"training example {oid!r} not in universe")

    def pool_feature(self, feature_id: str) -> FeatureDef:
        for f in self.pool:
            if f.id == feature_id:
                return f
        raise KeyError(feature_id)

    def feature_set(self, feature_ids: tuple[str, ...] | None = None) -> FeatureSet:
        ids = self.initial_features if feature_ids is None else feature_ids
        return FeatureSet(tuple(self.pool_feature(fid) for fid in ids))


def _make_universe(items: list[Item]) -> dict[str, Item]:
    ordered = sorted(items, key=lambda it: it.id)
    universe = {}
    for item in ordered:
        if item.id in universe:
            raise ScenarioError(f"duplicate object id {item.id!r}")
        universe[item.id] = item
    return universe


# ---------------------------------------------------------------------------
# generators


def gen_xor() -> Scenario:
    """Four unit-square corners labeled by exclusive-or of their attributes.

    Not linearly separable under the projection features {a, b}; adding
    the product feature a*b makes it separable. The pool contains exactly
    those three features.
    """
    items = []
    target = {}
    for i, (a, b) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        oid = f"x{i}"
        items.append(Item(oid, {"a": float(a), "b": float(b)}))
        target[oid] = a ^ b
    pool = (
        FeatureDef.from_expr("a", "a"),
        FeatureDef.from_expr("b", "b"),
        FeatureDef.from_expr("ab", "a * b"),
    )
    return Scenario(
        universe=_make_universe(items),
        oracle=TargetOracle(target),
        pool=pool,
        initial_training=TrainingSet.from_pairs(target.items()),
        initial_features=("a", "b"),
    )


def gen_separable(n: int, d: int, margin: float, seed: int) -> Scenario:
    """n points in R^d, strictly separable with at least the given margin.

    Points are drawn from a standard normal and then shifted along a
    random unit normal so each lands at signed distance >= margin on its
    assigned side. Both classes are always populated for n >= 2. The pool
    holds the d coordinate projections, all initially selected, and the
    initial training set labels every object.
    """
    if n < 1 or d < 1 or margin <= 0:
        raise ScenarioError("gen_separable requires n >= 1, d >= 1, margin > 0")
    rng = np.random.default_rng(seed)
    normal = rng.normal(size=d)
    normal /= np.linalg.norm(normal)
    points = rng.normal(size=(n, d))
    labels = np.zeros(n, dtype=np.int64)
    labels[: (n + 1) // 2] = 1
    extra = np.abs(rng.normal(scale=0.5, size=n))
    width = len(str(max(n - 1, 1)))
    items = []
    target = {}
    for i in range(n):
        sign = 1.0 if labels[i] == 1 else -1.0
        s = float(normal @ points[i])
        s_target = sign * (margin + extra[i])
        points[i] += (s_target - s) * normal
        oid = f"p{i:0{width}d}"
        items.append(
            Item(oid, {f"x{j + 1}": float(points[i, j]) for j in range(d)})
        )
        target[oid] = int(labels[i])
    pool = tuple(FeatureDef.from_expr(f"x{j + 1}", f"x{j + 1}") for j in range(d))
    return Scenario(
        universe=_make_universe(items),
        oracle=TargetOracle(target),
        pool=pool,
        initial_training=TrainingSet.from_pairs(target.items()),
        initial_features=tuple(f.id for f in pool),
        seed=seed,
        meta={"normal": normal, "offset": 0.0, "margin": margin},
    )


def inject_mislabels(scenario: Scenario, rate: float, seed: int) -> Scenario:
    """Flip ceil(rate * |T|) labels in the initial training set.

    The intended labeling is untouched; flipped ids are recorded in
    scenario.meta["flipped_ids"].
    """
    if not 0.0 <= rate <= 1.0:
        raise ScenarioError("mislabel rate must be in [0, 1]")
    n = len(scenario.initial_training)
    count = math.ceil(rate * n)
    if count == 0:
        return replace(scenario, meta={**scenario.meta, "flipped_ids": []})
    rng = np.random.default_rng(seed)
    ids = list(scenario.initial_training.object_ids)
    flipped = sorted(rng.choice(ids, size=count, replace=False).tolist())
    flips = {
        oid: 1 - scenario.initial_training.label_of(oid) for oid in flipped
    }
    return replace(
        scenario,
        initial_training=scenario.initial_training.relabeled(flips),
        meta={**scenario.meta, "flipped_ids": flipped},
    )


def gen_figure1() -> Scenario:
    """Frozen 2-D set on which norm-penalized logistic regression errs.

    Two tight 20-point clusters plus one low-margin point: a class-1
    object sitting just beyond the class-0 cluster's edge. Classifying it
    correctly forces the boundary against the class-0 bulk, which costs
    more likelihood than the point is worth once the weight-vector
    penalty caps the attainable slope, so the penalized learners at
    lam in {0.5, 1.0} give it up, while the unpenalized learner fits
    everything (the set stays strictly separable). The data is a pure
    function of the fixed seed below; certification (0 errors at lam=0,
    >=1 at lam=0.5 and 1.0) lives in the test suite.
    """
    rng = np.random.default_rng(20240731)
    items = []
    target = {}
    for i in range(20):
        items.append(
            Item(
                f"n{i:02d}",
                {
                    "x1": float(-1.0 + 0.08 * rng.normal()),
                    "x2": float(0.25 * rng.normal()),
                },
            )
        )
        target[f"n{i:02d}"] = 0
    for i in range(20):
        items.append(
            Item(
                f"q{i:02d}",
                {
                    "x1": float(1.0 + 0.08 * rng.normal()),
                    "x2": float(0.25 * rng.normal()),
                },
            )
        )
        target[f"q{i:02d}"] = 1
    edge = max(item.attrs["x1"] for item in items[:20])
    items.append(Item("odd", {"x1": float(edge + 0.05), "x2": 0.0}))
    target["odd"] = 1
    pool = (
        FeatureDef.from_expr("x1", "x1"),
        FeatureDef.from_expr("x2", "x2"),
    )
    return Scenario(
        universe=_make_universe(items),
        oracle=TargetOracle(target),
        pool=pool,
        initial_training=TrainingSet.from_pairs(target.items()),
        initial_features=("x1", "x2"),
        seed=20240731,
    )


def with_conflicting_twin(scenario: Scenario, object_id: str) -> Scenario:
    """Add a twin of one object with identical attributes and flipped labels.

    The twin collides with the original under any feature set, so no
    memorization learner can fit both labels.
    """
    item = scenario.universe[object_id]
    twin_id = f"{object_id}~twin"
    if twin_id in scenario.universe:
        raise ScenarioError(f"twin id {twin_id!r} already taken")
    twin = Item(twin_id, dict(item.attrs))
    flipped = 1 - scenario.oracle.labeling[object_id]
    return replace(
        scenario,
        universe=_make_universe(list(scenario.universe.values()) + [twin]),
        oracle=TargetOracle({**scenario.oracle.labeling, twin_id: flipped}),
        initial_training=scenario.initial_training.with_example(twin_id, flipped),
        meta={**scenario.meta, "collision_pair": [object_id, twin_id]},
    )


def with_duplicate_objects(scenario: Scenario) -> Scenario:
    """Clone every object (same attributes and intended label).

    A clone pins its original down: flipping either one's training label
    creates a same-point label conflict once both are labeled.
    """
    clones = [
        Item(f"{item.id}~dup", dict(item.attrs))
        for item in scenario.universe.values()
    ]
    labeling = dict(scenario.oracle.labeling)
    pairs = list(scenario.initial_training.examples)
    for clone in clones:
        original = clone.id[: -len("~dup")]
        labeling[clone.id] = scenario.oracle.labeling[original]
        pairs.append((clone.id, labeling[clone.id]))
    return replace(
        scenario,
        universe=_make_universe(list(scenario.universe.values()) + clones),
        oracle=TargetOracle(labeling),
        initial_training=TrainingSet.from_pairs(pairs),
    )


# ---------------------------------------------------------------------------
# scenario files

BUILTIN_SCENARIOS: dict[str, dict] = {
    "xor": {
        "generator": gen_xor,
        "description": "four corners labeled by exclusive-or; the pool "
        "holds the product feature that fixes it",
    },
    "figure1": {
        "generator": gen_figure1,
        "description": "two clusters plus a low-margin inner pair that "
        "norm-penalized logistic regression sacrifices",
    },
    "separable": {
        "generator": lambda: gen_separable(16, 2, 0.5, seed=7),
        "description": "sixteen margin-separated points in the plane",
    },
}


def resolve_scenario(ref: str) -> Scenario:
    """Resolve a builtin scenario name or a scenario file path."""
    if ref in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[ref]["generator"]()
    return load_scenario(ref)


def scenario_to_doc(scenario: Scenario) -> dict:
    return {
        "objects": [
            {"id": item.id, "attrs": {k: float(v) for k, v in item.attrs.items()}}
            for item in scenario.universe.values()
        ],
        "target": {oid: int(y) for oid, y in sorted(scenario.oracle.labeling.items())},
        "feature_pool": [{"id": f.id, "expr": f.expr} for f in scenario.pool],
        "initial_training": [
            [oid, int(y)] for oid, y in scenario.initial_training.examples
        ],
        "initial_features": list(scenario.initial_features),
    }


def scenario_to_json(scenario: Scenario) -> str:
    return json.dumps(scenario_to_doc(scenario), indent=2, sort_keys=True) + "\n"


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(scenario_to_json(scenario), encoding="utf-8")


def scenario_from_doc(doc: Mapping) -> Scenario:
    for key in ("objects", "target", "feature_pool", "initial_training",
                "initial_features"):
        if key not in doc:
            raise ScenarioError(f"scenario is missing required key {key!r}")
    items = []
    for entry in doc["objects"]:
        try:
            items.append(
                Item(str(entry["id"]), {k: float(v) for k, v in entry["attrs"].items()})
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad object entry {entry!r}: {exc}") from None
    pool = []
    for entry in doc["feature_pool"]:
        try:
            pool.append(FeatureDef.from_expr(str(entry["id"]), str(entry["expr"])))
        except exprlang.ExprError as exc:
            raise ScenarioError(
                f"feature {entry.get('id')!r}: {exc}"
            ) from None
    try:
        training = TrainingSet.from_pairs(
            (str(oid), int(y)) for oid, y in doc["initial_training"]
        )
    except ValueError as exc:
        raise ScenarioError(f"bad initial_training: {exc}") from None
    return Scenario(
        universe=_make_universe(items),
        oracle=TargetOracle({str(k): int(v) for k, v in doc["target"].items()}),
        pool=tuple(pool),
        initial_training=training,
        initial_features=tuple(str(f) for f in doc["initial_features"]),
    )


def load_scenario(path: str | Path) -> Scenario:
    """Parse a scenario file, rejecting malformed input with positions."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: scenario must be a JSON object")
    try:
        return scenario_from_doc(doc)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
