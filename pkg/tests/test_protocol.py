import json

import pytest

from teachbench import protocol
from teachbench.diagnosis import LEARNER, classify_training_error
from teachbench.learners import LearnerSpec
from teachbench.protocol import (
    AWAIT_EXAMPLE,
    AWAIT_VERDICT,
    DONE,
    AddExample,
    AddFeature,
    CheckLabelsAnswer,
    CorrectLabels,
    ProtocolError,
    Terminate,
    new_session,
    oracle_teacher_response,
    replay,
    run_with_oracle_teacher,
    step,
)
from teachbench.scenarios import (
    Scenario,
    gen_separable,
    gen_xor,
    inject_mislabels,
    scenario_from_doc,
    scenario_to_doc,
    with_duplicate_objects,
)
from teachbench.domain import EMPTY_TRAINING_SET, TargetOracle


def session_fingerprint(session):
    from teachbench.learners import hypothesis_to_doc

    return json.dumps(
        {
            "training": list(session.training.examples),
            "features": list(session.feature_ids),
            "phase": session.phase,
            "outcome": session.outcome,
            "round": session.round,
            "hypothesis": hypothesis_to_doc(session.hypothesis),
            "events": [e.to_doc() for e in session.events],
        },
        sort_keys=True,
    )


def xor_without_product():
    doc = scenario_to_doc(gen_xor())
    doc["feature_pool"] = [f for f in doc["feature_pool"] if f["id"] != "ab"]
    return scenario_from_doc(doc)


def test_requires_consistent_learner_kind():
    with pytest.raises(ProtocolError, match="consistent"):
        new_session(gen_xor(), LearnerSpec.logreg_reg(1.0))
    with pytest.raises(ProtocolError, match="consistent"):
        new_session(gen_xor(), LearnerSpec.knn(3))


def test_single_example_is_always_fit():
    session = new_session(gen_xor(), LearnerSpec.logreg_ml())
    session = step(session, AddExample("x1", 1))
    assert session.phase == AWAIT_EXAMPLE
    assert session.training_error_ids == []
    assert session.round == 1


def test_mislabel_is_corrected_through_the_inner_loop():
    scenario = gen_xor()
    session = new_session(scenario, LearnerSpec.logreg_ml())
    session = step(session, AddExample("x0", 0))
    assert session.phase == AWAIT_EXAMPLE
    # teacher slips: x3 really has label 0
    session = step(session, AddExample("x3", 1))
    assert session.phase == AWAIT_VERDICT
    assert session.pending.kind == protocol.REQ_CHECK_LABELS
    flagged = session.pending.invalidation
    assert flagged == (("x0", 0), ("x3", 1))
    session = step(session, CheckLabelsAnswer(True))
    assert session.pending.kind == protocol.REQ_CORRECT_LABELS
    fixes = tuple(
        (oid, scenario.oracle(oid))
        for oid, y in flagged
        if y != scenario.oracle(oid)
    )
    assert fixes == (("x3", 0),)
    session = step(session, CorrectLabels(fixes))
    assert session.training.label_of("x3") == 0
    assert session.phase == AWAIT_EXAMPLE
    assert session.training_error_ids == []


def test_representation_fix_through_add_feature():
    scenario = gen_xor()
    session = new_session(scenario, LearnerSpec.logreg_ml())
    for oid in ("x0", "x1", "x2", "x3"):
        if session.phase == AWAIT_VERDICT:
            session = step(session, CheckLabelsAnswer(False))
            session = step(session, oracle_teacher_response(session))
        session = step(session, AddExample(oid, scenario.oracle(oid)))
    assert session.phase == AWAIT_VERDICT
    assert len(session.pending.invalidation) == 4
    session = step(session, CheckLabelsAnswer(False))
    assert session.pending.kind == protocol.REQ_ADD_FEATURE
    session = step(session, AddFeature("ab"))
    assert session.phase == AWAIT_EXAMPLE
    assert session.training_error_ids == []
    assert "ab" in session.feature_ids


def test_oracle_teacher_solves_xor():
    session = run_with_oracle_teacher(gen_xor(), LearnerSpec.logreg_ml(), 40)
    assert session.phase == DONE
    assert session.done_with_zero_errors
    assert "ab" in session.feature_ids
    scenario = session.scenario
    from teachbench.learners import as_item_classifier

    classify = as_item_classifier(session.hypothesis, session.feature_set)
    assert all(
        classify(item) == scenario.oracle(oid)
        for oid, item in scenario.universe.items()
    )


def test_oracle_teacher_corrects_injected_mislabels():
    noisy = with_duplicate_objects(
        inject_mislabels(gen_separable(8, 2, 0.5, seed=17), 0.1, seed=18)
    )
    assert noisy.meta["flipped_ids"]
    session = run_with_oracle_teacher(
        noisy, LearnerSpec.logreg_ml(), 10 * len(noisy.universe)
    )
    assert session.done_with_zero_errors
    mislabels = [
        oid for oid, y in session.training.examples if y != noisy.oracle(oid)
    ]
    assert mislabels == []


def test_empty_scenario_terminates_immediately():
    scenario = Scenario(
        universe={},
        oracle=TargetOracle({}),
        pool=(),
        initial_training=EMPTY_TRAINING_SET,
        initial_features=(),
    )
    session = run_with_oracle_teacher(scenario, LearnerSpec.logreg_ml(), 5)
    assert session.phase == DONE
    assert session.outcome == protocol.OUTCOME_COMPLETED
    assert len(session.events) == 1
    assert session.events[0].response == {"kind": "terminate"}


def test_pool_exhaustion_ends_not_realizable():
    session = run_with_oracle_teacher(
        xor_without_product(), LearnerSpec.logreg_ml(), 60
    )
    assert session.phase == DONE
    assert session.outcome == protocol.OUTCOME_NOT_REALIZABLE


def test_zero_training_errors_at_every_await_example_state():
    for spec in (LearnerSpec.logreg_ml(), LearnerSpec.one_nn()):
        scenario = with_duplicate_objects(
            inject_mislabels(gen_separable(6, 2, 0.5, seed=4), 0.1, seed=5)
        )
        session = new_session(scenario, spec)
        while session.phase != DONE:
            if session.phase == AWAIT_EXAMPLE:
                assert session.training_error_ids == []
            session = step(session, oracle_teacher_response(session))
        assert session.done_with_zero_errors


def test_replay_reproduces_final_state_bit_for_bit():
    scenario = with_duplicate_objects(
        inject_mislabels(gen_separable(7, 2, 0.5, seed=29), 0.1, seed=30)
    )
    session = run_with_oracle_teacher(
        scenario, LearnerSpec.logreg_ml(), 10 * len(scenario.universe)
    )
    replayed = replay(scenario, LearnerSpec.logreg_ml(),
                      [e.to_doc() for e in session.events])
    assert session_fingerprint(replayed) == session_fingerprint(session)


def test_inner_loop_progress_measure_strictly_decreases():
    scenario = with_duplicate_objects(
        inject_mislabels(gen_separable(8, 3, 0.5, seed=41), 0.15, seed=42)
    )
    session = new_session(scenario, LearnerSpec.logreg_ml())

    def measure(s):
        mislabeled = sum(
            1 for oid, y in s.training.examples if y != scenario.oracle(oid)
        )
        unused = sum(1 for f in scenario.pool if f.id not in s.feature_ids)
        return (mislabeled, unused)

    while session.phase != DONE:
        response = oracle_teacher_response(session)
        before = measure(session)
        fixing = isinstance(response, (CorrectLabels, AddFeature))
        session = step(session, response)
        if fixing:
            assert measure(session) < before
    assert session.done_with_zero_errors


def test_protocol_level_prop3_no_learner_diagnosis():
    scenario = with_duplicate_objects(
        inject_mislabels(gen_separable(6, 2, 0.5, seed=50), 0.1, seed=51)
    )
    for spec in (LearnerSpec.logreg_ml(), LearnerSpec.one_nn()):
        session = new_session(scenario, spec)
        while session.phase != DONE:
            if session.phase == AWAIT_VERDICT and session.pending.kind == (
                protocol.REQ_CHECK_LABELS
            ):
                verdict = classify_training_error(
                    session.training, session.feature_set, spec,
                    scenario.oracle, scenario.universe,
                )
                if verdict is not None:
                    assert verdict.category != LEARNER
            session = step(session, oracle_teacher_response(session))


def test_illegal_responses_are_rejected():
    scenario = gen_xor()
    session = new_session(scenario, LearnerSpec.logreg_ml())
    with pytest.raises(ProtocolError):
        step(session, CheckLabelsAnswer(True))
    with pytest.raises(ProtocolError):
        step(session, AddExample("nope", 1))
    session = step(session, AddExample("x0", 0))
    with pytest.raises(ProtocolError, match="already labeled"):
        step(session, AddExample("x0", 0))
    session = step(session, AddExample("x1", 1))  # p=0 conflict -> verdict
    assert session.pending.kind == protocol.REQ_CHECK_LABELS
    session = step(session, CheckLabelsAnswer(True))
    with pytest.raises(ProtocolError, match="outside"):
        step(session, CorrectLabels((("x3", 1),)))
    session = step(session, CorrectLabels(()))  # empty correction allowed
    assert session.phase == AWAIT_VERDICT  # conflict persists, loop re-asks
    session = step(session, CheckLabelsAnswer(False))
    with pytest.raises(ProtocolError, match="unknown pool feature"):
        step(session, AddFeature("zz"))
    session = step(session, AddFeature("b"))
    assert session.phase == AWAIT_EXAMPLE
    with pytest.raises(ProtocolError, match="already selected"):
        session2 = step(session, AddExample("x2", 1))
        step(step(session2, CheckLabelsAnswer(False)), AddFeature("b"))


def test_terminated_session_refuses_steps():
    session = new_session(gen_xor(), LearnerSpec.logreg_ml())
    session = step(session, Terminate())
    assert session.phase == DONE
    with pytest.raises(ProtocolError, match="finished"):
        step(session, AddExample("x0", 0))


def test_event_log_jsonl_round_trips():
    session = run_with_oracle_teacher(gen_xor(), LearnerSpec.logreg_ml(), 40)
    lines = protocol.events_to_jsonl(session).strip().split("\n")
    assert len(lines) == len(session.events)
    docs = [json.loads(line) for line in lines]
    for doc in docs:
        assert set(doc) == {"round", "phase", "request", "response",
                            "training_error_count"}
    replayed = replay(session.scenario, session.spec, docs)
    assert session_fingerprint(replayed) == session_fingerprint(session)
