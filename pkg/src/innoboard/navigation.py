"""Jump-point directory, link resolution and backlinks.

Pure queries over an immutable document. Dangling references are values,
not errors: notes can be deleted at any time by anyone, so a link target
disappearing must never invalidate the document.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Project,
    board_order,
    board_visible,
    note_alive,
    note_nav_refs,
    visible_notes,
)

PREVIEW_CHARS = 40


@dataclass(frozen=True, slots=True)
class BoardTitlePoint:
    board_id: str
    title: str


@dataclass(frozen=True, slots=True)
class NotePoint:
    board_id: str
    note_id: str
    preview: str


@dataclass(frozen=True, slots=True)
class Location:
    board_id: str
    note_id: str | None = None


@dataclass(frozen=True, slots=True)
class Dangling:
    target: dict


@dataclass(frozen=True, slots=True)
class ExternalUrl:
    url: str


def _referenced_note_ids(project: Project) -> set:
    refs = set()
    for note in project.notes.values():
        if note.created is None:
            continue
        for entry in note.nav_refs.values():
            if entry.get("kind") == "note":
                refs.add(entry.get("note_id"))
    return refs


def jump_points(project: Project) -> list:
    """Navigation directory: every board title, then its referenced notes.

    Boards appear in project order; under each board come its live notes
    that some nav reference points at, in note-id order. Every entry
    resolves at the moment the directory is built.
    """
    referenced = _referenced_note_ids(project)
    points: list = []
    for board in board_order(project):
        points.append(
            BoardTitlePoint(board.board_id, board.values.get("title", ""))
        )
        for note in visible_notes(project, board.board_id):
            if note.note_id in referenced:
                text = note.values.get("text", "")
                points.append(
                    NotePoint(board.board_id, note.note_id, text[:PREVIEW_CHARS])
                )
    return points


def resolve(project: Project, target: dict):
    """Follow one nav target to a live location, a dangling marker, or out."""
    kind = target.get("kind")
    if kind == "external":
        return ExternalUrl(target["url"])
    if kind == "block_title":
        board_id = target.get("board_id")
        if board_visible(project, board_id):
            return Location(board_id)
        return Dangling(dict(target))
    if kind == "note":
        note_id = target.get("note_id")
        if note_alive(project, note_id):
            note = project.notes[note_id]
            return Location(note.board_id, note_id)
        return Dangling(dict(target))
    return Dangling(dict(target))


def backlinks(
    project: Project, board_id: str, note_id: str | None = None
) -> list[tuple[str, str]]:
    """All (board_id, note_id) of live notes whose nav refs resolve here.

    `note_id` None asks for links to the board's block title; otherwise for
    links to that specific note. Sorted by board order, then note id.
    """
    rank = {b.board_id: i for i, b in enumerate(board_order(project))}
    hits = []
    for note in project.notes.values():
        if not note_alive(project, note.note_id):
            continue
        for entry in note_nav_refs(note):
            target = entry["target"]
            resolved = resolve(project, target)
            if not isinstance(resolved, Location):
                continue
            if resolved.board_id == board_id and resolved.note_id == note_id:
                hits.append((note.board_id, note.note_id))
                break
    hits.sort(key=lambda pair: (rank.get(pair[0], len(rank)), pair[1]))
    return hits
