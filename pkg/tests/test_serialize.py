"""Canonical documents: hashing, round trips, replay verification."""

import json
from fractions import Fraction as F

import pytest

from gammacert import (
    InputError,
    document_bytes,
    dump_document,
    load_document,
    plan_body,
    plan_from_body,
    report_body,
    state_body,
    state_from_body,
)
from gammacert.builder import build
from gammacert.serialize import body_hash, canonical_bytes, unwrap_document, wrap_document
from gammacert.verifier import coeff_box_lemma3


def test_canonical_bytes_stable():
    a = canonical_bytes({"b": "2", "a": ["1", "-3"]})
    b = canonical_bytes({"a": ["1", "-3"], "b": "2"})
    assert a == b == b'{"a":["1","-3"],"b":"2"}'


def test_wrap_and_unwrap():
    doc = wrap_document("demo", {"k": "1"})
    assert doc["schema"] == 1 and doc["kind"] == "demo"
    assert doc["sha256"] == body_hash({"k": "1"})
    assert unwrap_document(doc, "demo") == {"k": "1"}
    with pytest.raises(InputError):
        unwrap_document(doc, "other")


def test_tamper_detection():
    doc = wrap_document("demo", {"k": "1"})
    doc["body"]["k"] = "2"
    with pytest.raises(InputError, match="content hash"):
        unwrap_document(doc)


def test_plan_round_trip(toy_state):
    body = plan_body(toy_state.plan, toy_state.schedule)
    plan, schedule = plan_from_body(body)
    assert plan == toy_state.plan
    assert schedule.exponents == toy_state.schedule.exponents
    assert schedule.invariant_failures == toy_state.schedule.invariant_failures
    # every leaf is a string, list, or dict: no raw ints in the document
    def leaves(node):
        if isinstance(node, dict):
            for v in node.values():
                yield from leaves(v)
        elif isinstance(node, list):
            for v in node:
                yield from leaves(v)
        else:
            yield node
    assert all(isinstance(leaf, (str, bool)) for leaf in leaves(body))


def test_plan_body_rejects_unknown_alpha(toy_state):
    body = plan_body(toy_state.plan, toy_state.schedule)
    body = json.loads(json.dumps(body))
    body["alpha"] = "cube7"
    with pytest.raises(InputError):
        plan_from_body(body)


def test_document_bytes_deterministic(toy_state):
    body = plan_body(toy_state.plan, toy_state.schedule)
    assert document_bytes("plan", body) == document_bytes("plan", body)


def test_file_round_trip(tmp_path, toy_state):
    path = str(tmp_path / "plan.json")
    body = plan_body(toy_state.plan, toy_state.schedule)
    dump_document(path, "plan", body)
    loaded = load_document(path, "plan")
    assert loaded == json.loads(json.dumps(body))
    raw = json.load(open(path))
    raw["body"]["delta"] = "1/3"
    with open(path, "w") as fh:
        json.dump(raw, fh)
    with pytest.raises(InputError, match="content hash"):
        load_document(path, "plan")


def test_state_round_trip(toy_state):
    body = state_body(toy_state)
    assert len(body["series"]) == 7
    assert [s["i"] for s in body["series"]] == [str(i) for i in range(7)]
    assert "delta_up" not in body["series"][0]
    assert "xu_up" not in body["series"][6]
    assert body["series"][1]["delta_up"]["mid_man"]
    replayed = state_from_body(body, lambda p, s: build(p, s))
    assert replayed.xs == toy_state.xs and replayed.ys == toy_state.ys


def test_state_replay_detects_divergence(toy_state):
    body = json.loads(json.dumps(state_body(toy_state)))
    body["xs"][3][0] = str(int(body["xs"][3][0]) + 1)
    with pytest.raises(InputError, match="disagree"):
        state_from_body(body, lambda p, s: build(p, s))


def test_report_body_generic(toy_state):
    rep = coeff_box_lemma3(toy_state, 2)
    body = report_body(rep)
    assert body["points_total"] == "4912"
    assert body["violations"] == []
    with pytest.raises(InputError):
        report_body({"not": "a dataclass"})
