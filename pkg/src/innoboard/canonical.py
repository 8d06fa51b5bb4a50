"""Canonical document serialization.

Two replicas holding the same state must produce identical bytes here, so
the format pins down everything JSON leaves open: keys sorted, sets sorted
by id, floats at 9 significant digits, UTF-8, LF line endings, trailing
newline. The same bytes serve as snapshot content, export payload and the
currency of every convergence check.
"""

from __future__ import annotations

import hashlib
import json

from .model import (
    BoardRec,
    ConnRec,
    NoteRec,
    Project,
    board_order,
    chat_messages,
    note_attachments,
    note_nav_refs,
    note_position,
    note_size,
    visible_notes,
)
from .stamps import Stamp


def format_float(x: float) -> str:
    if x == 0:
        return "0"
    return f"{x:.9g}"


def _board_connection_records(project: Project, board_id: str) -> list[ConnRec]:
    records = [
        rec
        for pair_records in project.connections.values()
        for rec in pair_records.values()
        if rec.board_id == board_id
    ]
    records.sort(key=lambda r: r.connection_id)
    return records


def _note_to_jsonable(note: NoteRec) -> dict:
    x, y = note_position(note)
    w, h = note_size(note)
    return {
        "attachments": note_attachments(note),
        "color": note.values.get("color"),
        "created": note.created.as_json(),
        "field_stamps": {
            name: stamp.as_json() for name, stamp in sorted(note.stamps.items())
        },
        "highlighted": note.values.get("highlighted", False),
        "nav_refs": note_nav_refs(note),
        "note_id": note.note_id,
        "position": [x, y],
        "removed": {
            "attachments": sorted(note.removed_attachments),
            "nav_refs": sorted(note.removed_nav_refs),
        },
        "size": [w, h],
        "text": note.values.get("text", ""),
    }


def _board_to_jsonable(project: Project, board: BoardRec) -> dict:
    return {
        "board_id": board.board_id,
        "connections": [
            {
                "connection_id": rec.connection_id,
                "from_note": rec.from_note,
                "stamp": rec.stamp.as_json(),
                "to_note": rec.to_note,
            }
            for rec in _board_connection_records(project, board.board_id)
        ],
        "created": board.created.as_json(),
        "field_stamps": {
            name: stamp.as_json() for name, stamp in sorted(board.stamps.items())
        },
        "kind": board.kind,
        "notes": [_note_to_jsonable(n) for n in visible_notes(project, board.board_id)],
        "perspective": board.values.get("perspective", "overview"),
        "technique": board.technique,
        "title": board.values.get("title", ""),
    }


def project_to_jsonable(project: Project) -> dict:
    """Observable document as plain JSON data, deterministically ordered."""
    return {
        "boards": [_board_to_jsonable(project, b) for b in board_order(project)],
        "chat": [
            {"author": m["author"], "stamp": m["stamp"].as_json(), "text": m["text"]}
            for m in chat_messages(project)
        ],
        "default_locale": project.default_locale,
        "field_stamps": {
            name: stamp.as_json() for name, stamp in sorted(project.stamps.items())
        },
        "project_id": project.project_id,
        "stage": project.values.get("stage"),
        "title": project.values.get("title", ""),
        "tombstones": {
            "connections": sorted(project.conn_tombstones),
            "notes": sorted(project.note_tombstones),
        },
    }


def _emit(value, out: list, depth: int) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(value)
        for i, key in enumerate(keys):
            out.append(f"{inner}{json.dumps(key, ensure_ascii=False)}: ")
            _emit(value[key], out, depth + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(inner)
            _emit(item, out, depth + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"not canonicalizable: {type(value).__name__}")


def emit(value) -> str:
    out: list = []
    _emit(value, out, 0)
    out.append("\n")
    return "".join(out)


def canonical_bytes(project: Project) -> bytes:
    return emit(project_to_jsonable(project)).encode("utf-8")


def canonical_hash(project: Project) -> str:
    return hashlib.sha256(canonical_bytes(project)).hexdigest()


# --------------------------------------------------------------------------
# parsing canonical / exported documents back into live state


def _pair(value) -> tuple[float, float]:
    return (float(value[0]), float(value[1]))


def project_from_jsonable(data: dict) -> Project:
    project = Project(
        project_id=data["project_id"],
        default_locale=data.get("default_locale", "en"),
    )
    project.values = {"stage": data["stage"], "title": data["title"]}
    project.stamps = {
        name: Stamp.from_json(s) for name, s in data["field_stamps"].items()
    }
    tombs = data.get("tombstones", {})
    project.note_tombstones = set(tombs.get("notes", []))
    project.conn_tombstones = set(tombs.get("connections", []))
    for board_data in data["boards"]:
        board = BoardRec(
            board_id=board_data["board_id"],
            kind=board_data["kind"],
            created=Stamp.from_json(board_data["created"]),
            technique=board_data.get("technique"),
        )
        board.values = {
            "perspective": board_data["perspective"],
            "title": board_data["title"],
        }
        board.stamps = {
            name: Stamp.from_json(s)
            for name, s in board_data["field_stamps"].items()
        }
        project.boards[board.board_id] = board
        for note_data in board_data["notes"]:
            note = NoteRec(
                note_id=note_data["note_id"],
                board_id=board.board_id,
                created=Stamp.from_json(note_data["created"]),
            )
            note.values = {
                "color": note_data["color"],
                "highlighted": note_data["highlighted"],
                "position": _pair(note_data["position"]),
                "size": _pair(note_data["size"]),
                "text": note_data["text"],
            }
            note.stamps = {
                name: Stamp.from_json(s)
                for name, s in note_data["field_stamps"].items()
            }
            note.attachments = {
                a["id"]: {"label": a["label"], "url": a["url"]}
                for a in note_data["attachments"]
            }
            note.nav_refs = {
                r["id"]: dict(r["target"]) for r in note_data["nav_refs"]
            }
            removed = note_data.get("removed", {})
            note.removed_attachments = set(removed.get("attachments", []))
            note.removed_nav_refs = set(removed.get("nav_refs", []))
            project.notes[note.note_id] = note
        for conn_data in board_data["connections"]:
            a, b = conn_data["from_note"], conn_data["to_note"]
            pair = (a, b) if a < b else (b, a)
            rec = ConnRec(
                connection_id=conn_data["connection_id"],
                board_id=board.board_id,
                from_note=a,
                to_note=b,
                stamp=Stamp.from_json(conn_data["stamp"]),
            )
            project.connections.setdefault(pair, {})[rec.connection_id] = rec
    for chat_data in data["chat"]:
        stamp = Stamp.from_json(chat_data["stamp"])
        project.chat[stamp] = {
            "author": chat_data["author"],
            "text": chat_data["text"],
        }
    return project


def project_from_bytes(raw: bytes) -> Project:
    return project_from_jsonable(json.loads(raw.decode("utf-8")))
