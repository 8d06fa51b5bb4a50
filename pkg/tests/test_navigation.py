import random

from conftest import new_board, new_note, new_replica

from innoboard import ops
from innoboard.model import board_order, note_alive
from innoboard.navigation import (
    BoardTitlePoint,
    Dangling,
    ExternalUrl,
    Location,
    NotePoint,
    backlinks,
    jump_points,
    resolve,
)
from innoboard.sim import _SimClient


def test_empty_project_has_no_jump_points(replica):
    assert jump_points(replica.doc) == []


def test_boards_without_refs_list_titles_only():
    replica = new_replica()
    first = new_board(replica, "free_wall", "One")
    second = new_board(replica, "swot", "Two")
    points = jump_points(replica.doc)
    assert points == [
        BoardTitlePoint(first, "One"),
        BoardTitlePoint(second, "Two"),
    ]


def test_referenced_note_appears_under_its_board():
    replica = new_replica()
    board = new_board(replica, "free_wall", "Wall")
    target = new_note(replica, board, (0.2, 0.2), "a very important idea " + "x" * 60)
    source = new_note(replica, board, (0.6, 0.6), "see also")
    replica.emit(ops.add_nav_ref, source, ops.nav_note(board, target))
    points = jump_points(replica.doc)
    notes = [p for p in points if isinstance(p, NotePoint)]
    assert len(notes) == 1
    assert notes[0].note_id == target
    assert len(notes[0].preview) == 40


def test_resolve_live_note():
    replica = new_replica()
    board = new_board(replica)
    note = new_note(replica, board)
    assert resolve(replica.doc, ops.nav_note(board, note)) == Location(board, note)


def test_resolve_deleted_note_dangles():
    replica = new_replica()
    board = new_board(replica)
    note = new_note(replica, board)
    replica.emit(ops.delete_note, note)
    resolved = resolve(replica.doc, ops.nav_note(board, note))
    assert isinstance(resolved, Dangling)


def test_resolve_external_passthrough():
    url = "https://cloud.example.com/video.mp4"
    assert resolve(new_replica().doc, ops.nav_external(url)) == ExternalUrl(url)


def test_resolve_block_title():
    replica = new_replica()
    board = new_board(replica, title="Detail board")
    assert resolve(replica.doc, ops.nav_block_title(board)) == Location(board)
    assert isinstance(
        resolve(replica.doc, ops.nav_block_title("b9.nobody")), Dangling
    )


def test_backlinks_empty_for_unreferenced_board():
    replica = new_replica()
    board = new_board(replica)
    assert backlinks(replica.doc, board) == []


def test_backlinks_single_link():
    replica = new_replica()
    board = new_board(replica)
    a = new_note(replica, board, (0.1, 0.1), "A")
    b = new_note(replica, board, (0.5, 0.5), "B")
    replica.emit(ops.add_nav_ref, a, ops.nav_note(board, b))
    assert backlinks(replica.doc, board, b) == [(board, a)]
    assert backlinks(replica.doc, board, a) == []


def test_backlinks_symmetric_pair():
    replica = new_replica()
    board = new_board(replica)
    a = new_note(replica, board, (0.1, 0.1), "A")
    b = new_note(replica, board, (0.5, 0.5), "B")
    replica.emit(ops.add_nav_ref, a, ops.nav_note(board, b))
    replica.emit(ops.add_nav_ref, b, ops.nav_note(board, a))
    assert backlinks(replica.doc, board, b) == [(board, a)]
    assert backlinks(replica.doc, board, a) == [(board, b)]


def test_directory_entries_never_dangle():
    rng = random.Random(99)
    sim = _SimClient("nav", "TestProject0000000000A", "test")
    for _ in range(120):
        sim.emit_random(rng)
    doc = sim.replica.doc
    for point in jump_points(doc):
        if isinstance(point, BoardTitlePoint):
            target = ops.nav_block_title(point.board_id)
        else:
            target = ops.nav_note(point.board_id, point.note_id)
        assert isinstance(resolve(doc, target), Location)


def test_backlinks_match_brute_force_on_random_docs():
    rng = random.Random(4242)
    sim = _SimClient("nav", "TestProject0000000000A", "test")
    for _ in range(150):
        sim.emit_random(rng)
    doc = sim.replica.doc

    def brute_force(board_id, note_id):
        # Independent recomputation: scan every live note's refs directly.
        rank = {b.board_id: i for i, b in enumerate(board_order(doc))}
        found = []
        for nid in doc.notes:
            if not note_alive(doc, nid):
                continue
            for target in doc.notes[nid].nav_refs.values():
                if target.get("kind") == "note" and note_id is not None:
                    hit = target.get("note_id") == note_id and note_alive(doc, note_id)
                elif target.get("kind") == "block_title" and note_id is None:
                    hit = target.get("board_id") == board_id
                else:
                    hit = False
                if hit:
                    found.append((doc.notes[nid].board_id, nid))
                    break
        return sorted(found, key=lambda p: (rank.get(p[0], 99), p[1]))

    for board in board_order(doc):
        assert backlinks(doc, board.board_id) == brute_force(board.board_id, None)
        for nid in sorted(doc.notes):
            if note_alive(doc, nid) and doc.notes[nid].board_id == board.board_id:
                assert backlinks(doc, board.board_id, nid) == brute_force(
                    board.board_id, nid
                )
