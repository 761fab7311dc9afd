import json

import pytest

from polartree.engines import ParseOptions, parse
from polartree.service import DebugService, ServiceError, create_app, load_service
from polartree.trees import to_bracketed

from .conftest import FIXTURES, fixture_pair


@pytest.fixture
def service():
    return load_service(
        {
            "contraction": (
                FIXTURES / "contraction/grammar.json",
                FIXTURES / "contraction/lexicon.json",
            ),
            "clitic": (FIXTURES / "clitic/grammar.json", FIXTURES / "clitic/lexicon.json"),
        }
    )


def step_to_saturation(service, sid):
    state = service.get_state(sid)
    while state["status"] == "MERGING":
        cand = next(c for c in state["candidates"] if c["outcome"] == "OK")
        state = service.apply_merge(sid, cand["a"], cand["b"])
    return state


def test_create_session_errors(service):
    with pytest.raises(ServiceError) as e:
        service.create_session("", "contraction")
    assert e.value.code == "EMPTY_INPUT"
    with pytest.raises(ServiceError) as e:
        service.create_session("x", "nope")
    assert e.value.code == "UNKNOWN_GRAMMAR"


def test_unknown_word_session_is_selecting_with_no_choices(service):
    state = service.create_session("jean xyzzy", "clitic")
    assert state["status"] == "SELECTING"
    assert state["selections_kept"] == 0
    listing = service.list_selections(state["session"])
    assert listing["selections"] == []


def test_list_selections_cap_and_continuation(service):
    state = service.create_session("jean la voit .", "clitic")
    sid = state["session"]
    no_filter = DebugService(service.grammars, options=ParseOptions(use_filter=False))
    state2 = no_filter.create_session("jean la voit .", "clitic")
    listing = no_filter.list_selections(state2["session"], offset=0, cap=1)
    assert len(listing["selections"]) == 1
    assert listing["continuation"] == 1
    rest = no_filter.list_selections(state2["session"], offset=listing["continuation"], cap=10)
    assert rest["continuation"] is None
    # after choosing, listing is a state error
    service.choose_selection(sid, 0)
    with pytest.raises(ServiceError) as e:
        service.list_selections(sid)
    assert e.value.code == "WRONG_STATE"


def test_choose_selection_bad_index(service):
    sid = service.create_session("jean la voit .", "clitic")["session"]
    with pytest.raises(ServiceError) as e:
        service.choose_selection(sid, 99)
    assert e.value.code == "BAD_INDEX"


def test_stepping_reaches_batch_model(service):
    sid = service.create_session("qu'aime marie", "contraction")["session"]
    state = service.choose_selection(sid, 0)
    assert state["status"] == "MERGING"
    final = step_to_saturation(service, sid)
    assert final["status"] == "SATURATED"
    assert len(final["models"]) == 1

    grammar, lexicon = fixture_pair("contraction")
    batch = parse("qu'aime marie", grammar, lexicon)
    assert final["models"][0]["bracketed"] == to_bracketed(batch.models[0].tree)


def test_merge_then_undo_restores_exported_state(service):
    sid = service.create_session("qu'aime marie", "contraction")["session"]
    state = service.choose_selection(sid, 0)
    before = json.dumps(service.get_state(sid), sort_keys=True)
    cand = next(c for c in state["candidates"] if c["outcome"] == "OK")
    service.apply_merge(sid, cand["a"], cand["b"])
    service.undo(sid)
    after = json.dumps(service.get_state(sid), sort_keys=True)
    assert before == after


def test_undo_at_bottom_is_wrong_state(service):
    sid = service.create_session("qu'aime marie", "contraction")["session"]
    service.choose_selection(sid, 0)
    with pytest.raises(ServiceError) as e:
        service.undo(sid)
    assert e.value.code == "WRONG_STATE"


def test_candidates_include_predicted_failures(service):
    sid = service.create_session("jean la voit .", "clitic")["session"]
    state = service.choose_selection(sid, 0)
    outcomes = {c["outcome"] for c in state["candidates"]}
    assert "OK" in outcomes
    for cand in state["candidates"]:
        if cand["outcome"] != "OK":
            with pytest.raises(ServiceError) as e:
                service.apply_merge(sid, cand["a"], cand["b"])
            assert e.value.code == "MERGE_FAILED"
            break


def test_bad_pair_rejected(service):
    sid = service.create_session("jean la voit .", "clitic")["session"]
    service.choose_selection(sid, 0)
    with pytest.raises(ServiceError) as e:
        service.apply_merge(sid, "zz", "yy")
    assert e.value.code == "BAD_PAIR"


def test_replay_matches_engine_primitives(service):
    from polartree.descriptions import canonical_key, juxtapose, merge_nodes

    sid = service.create_session("qu'aime marie", "contraction")["session"]
    service.choose_selection(sid, 0)
    final = step_to_saturation(service, sid)
    session = service.sessions[sid]
    replay = juxtapose([i.ptd for i in session.selections[session.chosen]])
    for a, b in session.merges:
        replay = merge_nodes(replay, a, b)
    assert canonical_key(replay) == canonical_key(session.top)
    assert final["depth"] == len(session.merges)


def test_sessions_expire_when_idle(service):
    sid = service.create_session("jean la voit .", "clitic")["session"]
    service.sessions[sid].last_used -= service.idle_seconds + 1
    with pytest.raises(ServiceError) as e:
        service.get_state(sid)
    assert e.value.code == "UNKNOWN_SESSION"


def test_delete_session(service):
    sid = service.create_session("jean la voit .", "clitic")["session"]
    assert service.delete_session(sid) == {"deleted": sid}
    with pytest.raises(ServiceError):
        service.get_state(sid)


def test_http_wrapper_roundtrip(service):
    from fastapi.testclient import TestClient

    client = TestClient(create_app(service))
    created = client.post(
        "/create-session", json={"sentence": "qu'aime marie", "grammar": "contraction"}
    )
    assert created.status_code == 200
    sid = created.json()["session"]
    chosen = client.post("/choose-selection", json={"session": sid, "index": 0})
    assert chosen.json()["status"] == "MERGING"
    state = chosen.json()
    while state["status"] == "MERGING":
        cand = next(c for c in state["candidates"] if c["outcome"] == "OK")
        state = client.post(
            "/merge", json={"session": sid, "a": cand["a"], "b": cand["b"]}
        ).json()
    assert state["status"] == "SATURATED"
    assert len(state["models"]) == 1

    err = client.post("/merge", json={"session": sid, "a": "x", "b": "y"})
    assert err.status_code == 409
    assert err.json()["error"]["code"] == "WRONG_STATE"
    assert client.post("/delete-session", json={"session": sid}).status_code == 200
