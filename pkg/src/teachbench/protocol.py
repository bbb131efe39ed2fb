"""The error-driven teaching loop as an explicit state machine.

A session alternates between two resting phases until done. In
``await_example`` the teacher either terminates or supplies one labeled
example; the learner immediately retrains (killing any boundary error on
that object). While the retrained classifier still disagrees with some
training label, the session surfaces an invalidation set and awaits the
teacher's verdict (``await_verdict``): labels wrong -> corrections are
applied; labels right -> an unused pool feature is added; either way the
learner retrains and the check repeats. If features run out while errors
remain, the session ends with the ``not_realizable`` outcome.

Teacher interaction is request/response so an in-process simulated
teacher and a human behind an HTTP service drive the same machine. Every
step is pure (sessions are immutable values) and appends one event to the
session log; replaying a log against a fresh session reproduces the final
session exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from . import invalidation, learners
from .domain import (
    EMPTY_TRAINING_SET,
    FeatureSet,
    TrainingSet,
    featurize_training_set,
)
from .learners import Hypothesis, LearnerSpec
from .scenarios import Scenario

AWAIT_EXAMPLE = "await_example"
AWAIT_VERDICT = "await_verdict"
DONE = "done"

REQ_AWAIT_EXAMPLE = "await_example"
REQ_CHECK_LABELS = "check_labels"
REQ_CORRECT_LABELS = "correct_labels"
REQ_ADD_FEATURE = "add_feature"

OUTCOME_COMPLETED = "completed"
OUTCOME_NOT_REALIZABLE = "not_realizable"


class ProtocolError(ValueError):
    """A teacher response that the pending request does not admit."""


@dataclass(frozen=True)
class AddExample:
    object_id: str
    label: int


@dataclass(frozen=True)
class Terminate:
    pass


@dataclass(frozen=True)
class CheckLabelsAnswer:
    found_mislabeled: bool


@dataclass(frozen=True)
class CorrectLabels:
    relabels: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class AddFeature:
    feature_id: str


TeacherResponse = Union[AddExample, Terminate, CheckLabelsAnswer, CorrectLabels, AddFeature]

_ACCEPTS = {
    REQ_AWAIT_EXAMPLE: ("add_example", "terminate"),
    REQ_CHECK_LABELS: ("check_labels",),
    REQ_CORRECT_LABELS: ("correct_labels",),
    REQ_ADD_FEATURE: ("add_feature",),
}


@dataclass(frozen=True)
class PendingRequest:
    kind: str
    invalidation: Optional[tuple[tuple[str, int], ...]] = None

    @property
    def accepts(self) -> tuple[str, ...]:
        return _ACCEPTS[self.kind]

    def to_doc(self) -> dict:
        doc = {"kind": self.kind, "accepts": list(self.accepts)}
        if self.invalidation is not None:
            doc["invalidation_set"] = [[oid, int(y)] for oid, y in self.invalidation]
        return doc


@dataclass(frozen=True)
class ProtocolEvent:
    round: int
    phase: str
    request: str
    response: dict
    training_error_count: int

    def to_doc(self) -> dict:
        return {
            "round": self.round,
            "phase": self.phase,
            "request": self.request,
            "response": self.response,
            "training_error_count": self.training_error_count,
        }


@dataclass(frozen=True)
class TeachingSession:
    scenario: Scenario
    spec: LearnerSpec
    training: TrainingSet
    feature_ids: tuple[str, ...]
    hypothesis: Hypothesis
    phase: str
    pending: Optional[PendingRequest]
    round: int
    events: tuple[ProtocolEvent, ...]
    outcome: Optional[str] = None

    @property
    def feature_set(self) -> FeatureSet:
        return self.scenario.feature_set(self.feature_ids)

    @property
    def training_error_ids(self) -> list[str]:
        data = featurize_training_set(
            self.feature_set, self.training, self.scenario.universe
        )
        return learners.training_error_ids(self.hypothesis, data)

    @property
    def done_with_zero_errors(self) -> bool:
        return (
            self.phase == DONE
            and self.outcome == OUTCOME_COMPLETED
            and not self.training_error_ids
        )


def new_session(scenario: Scenario, spec: LearnerSpec) -> TeachingSession:
    """Fresh session: empty training set and feature set, retrained once.

    The loop's guarantees rest on the learner fitting whatever it can, so
    only the consistent kinds are accepted.
    """
    if not spec.is_consistent_kind:
        raise ProtocolError(
            f"the teaching loop requires a consistent learner kind "
            f"(one of {learners.CONSISTENT_KINDS}), got {spec.kind!r}"
        )
    features = scenario.feature_set(())
    data = featurize_training_set(features, EMPTY_TRAINING_SET, scenario.universe)
    hypothesis = learners.fit(spec, data)
    return TeachingSession(
        scenario=scenario,
        spec=spec,
        training=EMPTY_TRAINING_SET,
        feature_ids=(),
        hypothesis=hypothesis,
        phase=AWAIT_EXAMPLE,
        pending=PendingRequest(REQ_AWAIT_EXAMPLE),
        round=0,
        events=(),
    )


def response_to_doc(response: TeacherResponse) -> dict:
    if isinstance(response, AddExample):
        return {"kind": "add_example", "object_id": response.object_id,
                "label": int(response.label)}
    if isinstance(response, Terminate):
        return {"kind": "terminate"}
    if isinstance(response, CheckLabelsAnswer):
        return {"kind": "check_labels",
                "found_mislabeled": bool(response.found_mislabeled)}
    if isinstance(response, CorrectLabels):
        return {"kind": "correct_labels",
                "relabels": [[oid, int(y)] for oid, y in response.relabels]}
    if isinstance(response, AddFeature):
        return {"kind": "add_feature", "feature_id": response.feature_id}
    raise TypeError(f"not a teacher response: {response!r}")


def response_from_doc(doc: dict) -> TeacherResponse:
    kind = doc.get("kind")
    if kind == "add_example":
        return AddExample(str(doc["object_id"]), int(doc["label"]))
    if kind == "terminate":
        return Terminate()
    if kind == "check_labels":
        return CheckLabelsAnswer(bool(doc["found_mislabeled"]))
    if kind == "correct_labels":
        return CorrectLabels(tuple((str(o), int(y)) for o, y in doc["relabels"]))
    if kind == "add_feature":
        return AddFeature(str(doc["feature_id"]))
    raise ProtocolError(f"unknown response kind {kind!r}")


def step(session: TeachingSession, response: TeacherResponse) -> TeachingSession:
    """Apply one teacher response; returns the successor session.

    Raises:
        ProtocolError: If the session is done, the response kind does not
            match the pending request, a relabel goes outside the
            presented invalidation set, or ids are unknown/duplicated.
    """
    if session.phase == DONE or session.pending is None:
        raise ProtocolError("session is finished")
    pending = session.pending
    kind = response_to_doc(response)["kind"]
    if kind not in pending.accepts:
        raise ProtocolError(
            f"pending request {pending.kind!r} does not accept {kind!r}"
        )

    if isinstance(response, Terminate):
        return _finish(session, response, OUTCOME_COMPLETED)

    if isinstance(response, AddExample):
        if response.object_id not in session.scenario.universe:
            raise ProtocolError(f"unknown object {response.object_id!r}")
        if response.object_id in session.training:
            raise ProtocolError(
                f"object {response.object_id!r} is already labeled"
            )
        training = session.training.with_example(response.object_id, response.label)
        return _retrain_and_route(session, response, training, session.feature_ids)

    if isinstance(response, CheckLabelsAnswer):
        if response.found_mislabeled:
            next_pending = PendingRequest(REQ_CORRECT_LABELS, pending.invalidation)
            return _record(session, response, next_pending, AWAIT_VERDICT)
        unused = [
            f.id
            for f in session.scenario.pool
            if f.id not in session.feature_ids
        ]
        if not unused:
            return _finish(session, response, OUTCOME_NOT_REALIZABLE)
        next_pending = PendingRequest(REQ_ADD_FEATURE, pending.invalidation)
        return _record(session, response, next_pending, AWAIT_VERDICT)

    if isinstance(response, CorrectLabels):
        allowed = {oid for oid, _ in (pending.invalidation or ())}
        for oid, _ in response.relabels:
            if oid not in allowed:
                raise ProtocolError(
                    f"relabel of {oid!r} is outside the presented invalidation set"
                )
        training = session.training.relabeled(dict(response.relabels))
        return _retrain_and_route(session, response, training, session.feature_ids)

    if isinstance(response, AddFeature):
        pool_ids = [f.id for f in session.scenario.pool]
        if response.feature_id not in pool_ids:
            raise ProtocolError(f"unknown pool feature {response.feature_id!r}")
        if response.feature_id in session.feature_ids:
            raise ProtocolError(
                f"feature {response.feature_id!r} is already selected"
            )
        feature_ids = session.feature_ids + (response.feature_id,)
        return _retrain_and_route(session, response, session.training, feature_ids)

    raise TypeError(f"not a teacher response: {response!r}")


def _current_error_count(session: TeachingSession) -> int:
    return len(session.training_error_ids)


def _finish(
    session: TeachingSession, response: TeacherResponse, outcome: str
) -> TeachingSession:
    event = ProtocolEvent(
        round=session.round + 1,
        phase=DONE,
        request=session.pending.kind,
        response=response_to_doc(response),
        training_error_count=_current_error_count(session),
    )
    return replace(
        session,
        phase=DONE,
        pending=None,
        outcome=outcome,
        round=session.round + 1,
        events=session.events + (event,),
    )


def _record(
    session: TeachingSession,
    response: TeacherResponse,
    pending: PendingRequest,
    phase: str,
) -> TeachingSession:
    event = ProtocolEvent(
        round=session.round + 1,
        phase=phase,
        request=session.pending.kind,
        response=response_to_doc(response),
        training_error_count=_current_error_count(session),
    )
    return replace(
        session,
        phase=phase,
        pending=pending,
        round=session.round + 1,
        events=session.events + (event,),
    )


def _retrain_and_route(
    session: TeachingSession,
    response: TeacherResponse,
    training: TrainingSet,
    feature_ids: tuple[str, ...],
) -> TeachingSession:
    features = session.scenario.feature_set(feature_ids)
    data = featurize_training_set(features, training, session.scenario.universe)
    hypothesis = learners.fit(session.spec, data)
    error_ids = learners.training_error_ids(hypothesis, data)

    if error_ids:
        result = _invalidation_for(session.spec, training, features, session.scenario)
        pending = PendingRequest(
            REQ_CHECK_LABELS, tuple(result.subset.examples)
        )
        phase = AWAIT_VERDICT
    else:
        pending = PendingRequest(REQ_AWAIT_EXAMPLE)
        phase = AWAIT_EXAMPLE

    event = ProtocolEvent(
        round=session.round + 1,
        phase=phase,
        request=session.pending.kind,
        response=response_to_doc(response),
        training_error_count=len(error_ids),
    )
    return replace(
        session,
        training=training,
        feature_ids=feature_ids,
        hypothesis=hypothesis,
        phase=phase,
        pending=pending,
        round=session.round + 1,
        events=session.events + (event,),
    )


def _invalidation_for(
    spec: LearnerSpec,
    training: TrainingSet,
    features: FeatureSet,
    scenario: Scenario,
) -> invalidation.InvalidationResult:
    try:
        result = invalidation.find_invalidation_set(
            training, features, spec, scenario.universe, mode=invalidation.EXACT
        )
    except invalidation.SubsetBudgetExceeded:
        result = invalidation.find_invalidation_set(
            training, features, spec, scenario.universe, mode=invalidation.GREEDY
        )
    if result is None:
        # a consistent learner with a training error always admits one
        raise RuntimeError(
            "no invalidation set found despite training errors; solver bug"
        )
    return result


def replay(
    scenario: Scenario, spec: LearnerSpec, events: list[dict] | tuple[dict, ...]
) -> TeachingSession:
    """Rebuild a session by replaying logged responses from scratch."""
    session = new_session(scenario, spec)
    for event in events:
        session = step(session, response_from_doc(event["response"]))
    return session


def events_to_jsonl(session: TeachingSession) -> str:
    import json

    return "".join(
        json.dumps(event.to_doc(), sort_keys=True) + "\n"
        for event in session.events
    )


# ---------------------------------------------------------------------------
# simulated teacher


def oracle_teacher_response(session: TeachingSession) -> TeacherResponse:
    """The simulated teacher's answer to the session's pending request.

    Labels come from the scenario's initial training table when present
    (so injected label noise flows through the protocol) and from the
    intended labeling otherwise. Label checks and corrections always
    consult the intended labeling. Feature choice prefers the first
    unused pool feature that makes the presented invalidation set
    realizable. Termination happens once every universe object is
    classified correctly (or nothing more can be labeled).
    """
    scenario = session.scenario
    pending = session.pending
    if pending is None:
        raise ProtocolError("session is finished")

    if pending.kind == REQ_AWAIT_EXAMPLE:
        classify = learners.as_item_classifier(session.hypothesis, session.feature_set)
        wrong = [
            oid
            for oid, item in scenario.universe.items()
            if classify(item) != scenario.oracle(oid)
        ]
        candidates = [oid for oid in wrong if oid not in session.training]
        if not candidates:
            return Terminate()
        oid = candidates[0]
        if oid in scenario.initial_training:
            label = scenario.initial_training.label_of(oid)
        else:
            label = scenario.oracle(oid)
        return AddExample(oid, label)

    if pending.kind == REQ_CHECK_LABELS:
        found = any(y != scenario.oracle(oid) for oid, y in pending.invalidation)
        return CheckLabelsAnswer(found)

    if pending.kind == REQ_CORRECT_LABELS:
        fixes = tuple(
            (oid, scenario.oracle(oid))
            for oid, y in pending.invalidation
            if y != scenario.oracle(oid)
        )
        return CorrectLabels(fixes)

    if pending.kind == REQ_ADD_FEATURE:
        unused = [f.id for f in scenario.pool if f.id not in session.feature_ids]
        flagged = TrainingSet(pending.invalidation)
        for fid in unused:
            candidate = session.feature_ids + (fid,)
            features = scenario.feature_set(candidate)
            data = featurize_training_set(features, flagged, scenario.universe)
            if not invalidation.rows_nonrealizable(session.spec, data.X, data.y):
                return AddFeature(fid)
        return AddFeature(unused[0])

    raise ProtocolError(f"unexpected pending request {pending.kind!r}")


def run_with_oracle_teacher(
    scenario: Scenario, spec: LearnerSpec, max_rounds: int
) -> TeachingSession:
    """Drive a fresh session with the simulated teacher until done.

    If the step budget runs out first, the session is returned in
    whatever non-done state it reached.
    """
    session = new_session(scenario, spec)
    while session.phase != DONE and session.round < max_rounds:
        session = step(session, oracle_teacher_response(session))
    return session
