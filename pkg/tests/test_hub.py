import re

from conftest import PROJECT_ID, Recorder, new_board, new_note

from innoboard import ops
from innoboard.canonical import canonical_bytes, project_from_jsonable
from innoboard.hub import Hub, ProjectHost
from innoboard.model import make_project
from innoboard.replication import ReplicaState
from innoboard.stamps import Stamp
from innoboard.store import ProjectStore

TOKEN_RE = re.compile(r"^[A-Za-z0-9]{22}$")


def fresh_host() -> ProjectHost:
    return ProjectHost(make_project(PROJECT_ID, title="test"))


def only_broadcast_ops(routed):
    return [msg for target, msg in routed if target == "*" and msg["t"] == "op"]


def test_create_project_token_format():
    hub = Hub()
    token = hub.create_project("Park")
    assert TOKEN_RE.match(token)
    assert hub.get(token) is not None
    assert hub.get(token).doc.values["title"] == "Park"


def test_create_project_tokens_distinct():
    hub = Hub()
    assert hub.create_project("a") != hub.create_project("b")


def test_hundred_tokens_no_collision():
    hub = Hub()
    tokens = {hub.create_project(f"p{i}") for i in range(100)}
    assert len(tokens) == 100


def test_hello_new_client_gets_snapshot_at_head():
    host = fresh_host()
    joined, routed = host.hello("alice", 0, "en")
    assert joined
    kinds = [(target, msg["t"]) for target, msg in routed]
    assert kinds == [(None, "snapshot"), ("*", "presence")]
    snapshot = routed[0][1]
    assert snapshot["seq"] == host.head_seq
    doc = project_from_jsonable(snapshot["doc"])
    assert canonical_bytes(doc) == canonical_bytes(host.doc)


def test_hello_at_head_gets_empty_replay():
    host = fresh_host()
    host.hello("alice", 0, "en")
    rec = Recorder("alice")
    board = new_board(rec)
    for op in rec.history:
        host.handle_op("alice", {"t": "op", "op": op})
    joined, routed = host.hello("bob", host.head_seq, "de")
    assert joined
    assert [msg["t"] for _, msg in routed] == ["presence"]


def test_reconnect_replays_exactly_the_gap():
    host = fresh_host()
    host.hello("alice", 0, "en")
    rec = Recorder("alice")
    board = new_board(rec)
    for i in range(6):
        new_note(rec, board, (0.1 * i, 0.1), f"n{i}")
    for op in rec.history:
        host.handle_op("alice", {"t": "op", "op": op})
    assert host.head_seq == 7
    _, routed = host.hello("bob", host.head_seq - 3, "de")
    op_msgs = [msg for _, msg in routed if msg["t"] == "op"]
    assert [m["seq"] for m in op_msgs] == [5, 6, 7]


def test_resync_from_zero_returns_snapshot():
    host = fresh_host()
    host.hello("alice", 0, "en")
    rec = Recorder("alice")
    new_board(rec)
    for op in rec.history:
        host.handle_op("alice", {"t": "op", "op": op})
    routed = host.resync("alice", 0)
    assert [msg["t"] for _, msg in routed] == ["snapshot"]


def test_resync_mid_stream_replays_gap():
    host = fresh_host()
    host.hello("alice", 0, "en")
    rec = Recorder("alice")
    board = new_board(rec)
    for i in range(3):
        new_note(rec, board, (0.2 * i, 0.1), f"n{i}")
    for op in rec.history:
        host.handle_op("alice", {"t": "op", "op": op})
    routed = host.resync("alice", 2)
    assert [msg["seq"] for _, msg in routed if msg["t"] == "op"] == [3, 4]


def test_stale_reconnect_after_compaction_gets_snapshot(tmp_path):
    store = ProjectStore(tmp_path)
    store.create(PROJECT_ID, make_project(PROJECT_ID, title="test"))
    host = ProjectHost.from_store(store, PROJECT_ID, compact_threshold=5)
    host.hello("alice", 0, "en")
    rec = Recorder("alice")
    board = new_board(rec)
    for i in range(6):
        new_note(rec, board, (0.1 * i, 0.1), f"n{i}")
    for op in rec.history:
        host.handle_op("alice", {"t": "op", "op": op})
    assert host.base_seq > 0
    _, routed = host.hello("bob", 1, "de")  # gap reaches into compacted history
    assert routed[0][1]["t"] == "snapshot"


def test_duplicate_client_id_rejected():
    host = fresh_host()
    host.hello("alice", 0, "en")
    joined, routed = host.hello("alice", 0, "de")
    assert not joined
    assert routed[0][1]["t"] == "error"
    assert routed[0][1]["code"] == "client_id_taken"


def test_broadcast_reaches_everyone_with_same_seq():
    host = fresh_host()
    host.hello("alice", 0, "en")
    host.hello("bob", 0, "de")
    host.hello("carol", 0, "fi")
    op = ops.create_board(Stamp(1, "alice"), "free_wall", "B")
    routed = host.handle_op("alice", {"t": "op", "op": op})
    broadcasts = only_broadcast_ops(routed)
    assert len(broadcasts) == 1  # one "*" fan-out message
    assert broadcasts[0]["seq"] == 1


def test_duplicate_op_acked_not_reappended():
    host = fresh_host()
    host.hello("alice", 0, "en")
    op = ops.create_board(Stamp(1, "alice"), "free_wall", "B")
    host.handle_op("alice", {"t": "op", "op": op})
    assert host.head_seq == 1
    routed = host.handle_op("alice", {"t": "op", "op": op})
    assert host.head_seq == 1  # log grew by exactly one over both sends
    assert routed == [(None, {"t": "op", "seq": 1, "op": op})]


def test_op_on_unknown_note_broadcast_as_recorded_noop():
    host = fresh_host()
    host.hello("alice", 0, "en")
    host.hello("bob", 0, "de")
    ghost_edit = ops.edit_note_text(Stamp(5, "alice"), "n4.ghost", "boo")
    routed = host.handle_op("alice", {"t": "op", "op": ghost_edit})
    assert only_broadcast_ops(routed)  # still broadcast
    alice = ReplicaState("a2", make_project(PROJECT_ID, title="test"))
    bob = ReplicaState("b2", make_project(PROJECT_ID, title="test"))
    for replica in (alice, bob):
        replica.integrate(ghost_edit)
    assert canonical_bytes(alice.doc) == canonical_bytes(bob.doc)
    assert canonical_bytes(alice.doc) == canonical_bytes(host.doc)


def test_wrong_project_error():
    host = fresh_host()
    host.hello("alice", 0, "en")
    op = ops.post_chat(Stamp(1, "alice"), "hi")
    routed = host.handle_op(
        "alice", {"t": "op", "project": "SomeOtherProject000000", "op": op}
    )
    assert routed[0][1]["code"] == "wrong_project"
    assert host.head_seq == 0


def test_malformed_payload_is_bad_op():
    host = fresh_host()
    host.hello("alice", 0, "en")
    bad = {"lamport": 1, "client": "alice", "action": "move_note", "note": "n1.a"}
    routed = host.handle_op("alice", {"t": "op", "op": bad})
    assert routed[0][1]["code"] == "bad_op"
    assert host.head_seq == 0


def test_op_before_hello_is_rejected():
    host = fresh_host()
    op = ops.post_chat(Stamp(1, "alice"), "hi")
    routed = host.handle_op("alice", {"t": "op", "op": op})
    assert routed[0][1]["code"] == "bad_op"


def test_presence_lifecycle():
    host = fresh_host()
    assert host.presence() == []
    host.hello("bob", 0, "de")
    host.hello("alice", 0, "en")
    host.hello("carol", 0, "fi")
    assert host.presence() == [("alice", "en"), ("bob", "de"), ("carol", "fi")]
    routed = host.leave("bob")
    assert routed[0][1]["t"] == "presence"
    assert [c["client"] for c in routed[0][1]["clients"]] == ["alice", "carol"]
    host.leave("alice")
    host.leave("carol")
    assert host.presence() == []
    assert host.leave("ghost") == []


def test_disconnect_reconnect_loses_nothing():
    host = fresh_host()
    host.hello("alice", 0, "en")
    mirror = ReplicaState("mirror", make_project(PROJECT_ID, title="test"))

    rec = Recorder("alice")
    board = new_board(rec)
    first_half = list(rec.history)
    for i in range(3):
        new_note(rec, board, (0.2 * i, 0.3), f"early{i}")
    second_half = rec.history[len(first_half):]

    for op in first_half:
        host.handle_op("alice", {"t": "op", "op": op})
    # Mirror session joins, receives the snapshot, then drops.
    for _, msg in host.hello("mirror", 0, "en")[1]:
        if msg["t"] == "snapshot":
            mirror.doc = project_from_jsonable(msg["doc"])
    seen = host.head_seq
    host.leave("mirror")

    for op in second_half:
        host.handle_op("alice", {"t": "op", "op": op})

    joined, routed = host.hello("mirror", seen, "en")
    assert joined
    replayed = [msg for _, msg in routed if msg["t"] == "op"]
    assert [m["seq"] for m in replayed] == [seen + 1 + i for i in range(len(second_half))]
    for msg in replayed:
        mirror.integrate(msg["op"])
    assert canonical_bytes(mirror.doc) == canonical_bytes(host.doc)
