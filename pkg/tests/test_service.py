import json

import pytest
from fastapi.testclient import TestClient

from teachbench.scenarios import gen_xor, scenario_to_doc
from teachbench.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def act(client, state, response):
    return client.post(
        f"/sessions/{state['session_id']}/actions",
        json={"version": state["version"], "response": response},
    )


def must_act(client, state, response):
    reply = act(client, state, response)
    assert reply.status_code == 200, reply.text
    return reply.json()


def test_builtin_scenarios_listed(client):
    reply = client.get("/scenarios")
    assert reply.status_code == 200
    names = {s["name"] for s in reply.json()["scenarios"]}
    assert {"xor", "figure1"} <= names


def test_create_inline_xor_session(client):
    reply = client.post(
        "/sessions", json={"scenario": scenario_to_doc(gen_xor()), "learner": "logreg-ml"}
    )
    assert reply.status_code == 201
    state = reply.json()
    assert state["phase"] == "await_example"
    assert state["training"] == []
    assert state["features"] == []
    assert state["version"] == 1
    assert len(state["objects"]) == 4
    assert set(state["predictions"]) == {"x0", "x1", "x2", "x3"}


def test_create_unknown_learner(client):
    reply = client.post("/sessions", json={"scenario": "xor", "learner": "forest"})
    assert reply.status_code == 400
    assert reply.json()["code"] == "unknown_learner"


def test_create_inconsistent_learner_cites_consistency(client):
    reply = client.post("/sessions", json={"scenario": "xor", "learner": "logreg-reg"})
    assert reply.status_code == 400
    body = reply.json()
    assert body["code"] == "inconsistent_learner"
    assert "consistent" in body["message"]


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404


def test_label_action_updates_state(client):
    state = client.post("/sessions", json={"scenario": "xor", "learner": "logreg-ml"}).json()
    state = must_act(
        client, state, {"kind": "add_example", "object_id": "x0", "label": 0}
    )
    assert len(state["training"]) == 1
    assert state["version"] == 2
    assert state["training_error_ids"] == []


def test_version_conflict_and_bad_kind(client):
    state = client.post("/sessions", json={"scenario": "xor", "learner": "logreg-ml"}).json()
    stale = dict(state, version=99)
    reply = act(client, stale, {"kind": "add_example", "object_id": "x0", "label": 0})
    assert reply.status_code == 409
    assert reply.json()["code"] == "version_conflict"

    reply = act(client, state, {"kind": "check_labels", "found_mislabeled": True})
    assert reply.status_code == 422
    assert reply.json()["code"] == "bad_response"


def _drive_xor_to_full_conflict(client):
    """Label all four corners, answering the inner loop along the way."""
    state = client.post("/sessions", json={"scenario": "xor", "learner": "logreg-ml"}).json()
    state = must_act(client, state, {"kind": "add_example", "object_id": "x0", "label": 0})
    state = must_act(client, state, {"kind": "add_example", "object_id": "x1", "label": 1})
    # p=0 conflict: decline mislabeling, add the splitting projection
    assert state["pending_request"]["kind"] == "check_labels"
    state = must_act(client, state, {"kind": "check_labels", "found_mislabeled": False})
    state = must_act(client, state, {"kind": "add_feature", "feature_id": "b"})
    assert state["training_error_ids"] == []
    state = must_act(client, state, {"kind": "add_example", "object_id": "x2", "label": 1})
    assert state["pending_request"]["kind"] == "check_labels"
    state = must_act(client, state, {"kind": "check_labels", "found_mislabeled": False})
    state = must_act(client, state, {"kind": "add_feature", "feature_id": "a"})
    assert state["training_error_ids"] == []
    assert state["boundary_polyline"]  # two features: the line is drawable
    state = must_act(client, state, {"kind": "add_example", "object_id": "x3", "label": 0})
    return state


def test_xor_mid_loop_shows_invalidation_of_four(client):
    state = _drive_xor_to_full_conflict(client)
    assert state["phase"] == "await_verdict"
    assert state["invalidation_set"] is not None
    assert len(state["invalidation_set"]) == 4


def test_correct_labels_outside_flagged_subset_rejected(client):
    state = _drive_xor_to_full_conflict(client)
    state = must_act(client, state, {"kind": "check_labels", "found_mislabeled": True})
    reply = act(client, state, {"kind": "correct_labels", "relabels": [["zz", 1]]})
    assert reply.status_code == 422
    assert "outside" in reply.json()["message"]
    # the rejected action must not have consumed the version
    reply = act(client, state, {"kind": "correct_labels", "relabels": [["x0", 1]]})
    assert reply.status_code == 200


def test_full_walkthrough_reaches_zero_errors_with_boundary(client):
    state = _drive_xor_to_full_conflict(client)
    state = must_act(client, state, {"kind": "check_labels", "found_mislabeled": False})
    assert state["pending_request"]["kind"] == "add_feature"
    state = must_act(client, state, {"kind": "add_feature", "feature_id": "ab"})
    assert state["phase"] == "await_example"
    assert state["training_error_ids"] == []
    assert state["predictions"] == {"x0": 0, "x1": 1, "x2": 1, "x3": 0}
    # three features, but the plotted plane still determines the classifier
    assert state["boundary_polyline"]
    state = must_act(client, state, {"kind": "terminate"})
    assert state["phase"] == "done"
    assert state["outcome"] == "completed"


def _answer_inner_loop(client, state, seen):
    while state["phase"] == "await_verdict":
        if state["pending_request"]["kind"] == "check_labels":
            state = must_act(
                client, state, {"kind": "check_labels", "found_mislabeled": False}
            )
        else:
            unused = [f["id"] for f in state["pool"] if not f["used"]]
            state = must_act(
                client, state, {"kind": "add_feature", "feature_id": unused[0]}
            )
        seen.append(state)
    return state


def test_no_await_example_state_ever_has_training_errors(client):
    state = client.post("/sessions", json={"scenario": "xor", "learner": "1nn"}).json()
    seen = [state]
    for oid, label in (("x0", 0), ("x1", 1), ("x2", 1), ("x3", 0)):
        state = must_act(
            client, state, {"kind": "add_example", "object_id": oid, "label": label}
        )
        seen.append(state)
        state = _answer_inner_loop(client, state, seen)
    for s in seen:
        if s["phase"] == "await_example":
            assert s["training_error_ids"] == []


def test_state_is_pure_function_of_event_log(client):
    from teachbench import protocol
    from teachbench.learners import LearnerSpec

    state = _drive_xor_to_full_conflict(client)
    again = client.get(f"/sessions/{state['session_id']}").json()
    assert again == state

    replayed = protocol.replay(
        gen_xor(), LearnerSpec.logreg_ml(), state["event_log"]
    )
    assert [e.to_doc() for e in replayed.events] == state["event_log"]
    assert [[oid, y] for oid, y in replayed.training.examples] == state["training"]
    assert list(replayed.feature_ids) == state["features"]
    assert replayed.phase == state["phase"]


def test_get_state_includes_featurized_coordinates(client):
    state = client.post("/sessions", json={"scenario": "xor", "learner": "logreg-ml"}).json()
    assert state["featurized"] == {oid: [] for oid in ("x0", "x1", "x2", "x3")}
    state = must_act(client, state, {"kind": "add_example", "object_id": "x0", "label": 0})
    assert state["featurized"]["x0"] == []
