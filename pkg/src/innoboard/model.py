"""Replicated board document and its deterministic transition function.

The state layout is chosen so that applying the same set of operations in
any order, with any duplication, lands every replica on the same document:

* Every mutable field is a last-writer-wins register (value + stamp).
* Deletions tombstone their target id forever, even when the target was
  never seen, so delete/create races cannot resurrect anything.
* Edits that arrive before their create (possible only on reordering
  links) are parked in latent records, invisible to every observer until
  the create shows up.
* Connections keep all records per unordered note pair; the observable one
  is the max-stamp survivor, so deleting a winner exposes the same
  runner-up everywhere.

Clamping to the unit square happens at observation time. Stored positions
are raw LWW winners; clamping on write would make move/resize pairs
non-commutative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ops import DEFAULT_COLOR, connection_id_for, note_id_for, board_id_for, op_stamp, validate_op
from .stamps import Stamp, ZERO_STAMP
from .templates import DEFAULT_NOTE_SIZE, TemplateKind, layout

NOTE_FIELDS = ("position", "size", "text", "color", "highlighted")


@dataclass(slots=True)
class NoteRec:
    note_id: str
    board_id: str | None = None
    created: Stamp | None = None
    values: dict = field(default_factory=dict)
    stamps: dict = field(default_factory=dict)
    attachments: dict = field(default_factory=dict)
    nav_refs: dict = field(default_factory=dict)
    removed_attachments: set = field(default_factory=set)
    removed_nav_refs: set = field(default_factory=set)

    def clone(self) -> "NoteRec":
        return NoteRec(
            note_id=self.note_id,
            board_id=self.board_id,
            created=self.created,
            values=dict(self.values),
            stamps=dict(self.stamps),
            attachments={k: dict(v) for k, v in self.attachments.items()},
            nav_refs={k: dict(v) for k, v in self.nav_refs.items()},
            removed_attachments=set(self.removed_attachments),
            removed_nav_refs=set(self.removed_nav_refs),
        )


@dataclass(slots=True)
class BoardRec:
    board_id: str
    kind: str | None = None
    created: Stamp | None = None
    values: dict = field(default_factory=dict)
    stamps: dict = field(default_factory=dict)
    technique: str | None = None

    def clone(self) -> "BoardRec":
        return BoardRec(
            board_id=self.board_id,
            kind=self.kind,
            created=self.created,
            values=dict(self.values),
            stamps=dict(self.stamps),
            technique=self.technique,
        )


@dataclass(slots=True)
class ConnRec:
    connection_id: str
    board_id: str
    from_note: str
    to_note: str
    stamp: Stamp


@dataclass(slots=True)
class Project:
    project_id: str
    default_locale: str = "en"
    values: dict = field(default_factory=dict)
    stamps: dict = field(default_factory=dict)
    boards: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    # unordered note pair -> {connection_id -> ConnRec}
    connections: dict = field(default_factory=dict)
    chat: dict = field(default_factory=dict)
    note_tombstones: set = field(default_factory=set)
    conn_tombstones: set = field(default_factory=set)

    def clone(self) -> "Project":
        return Project(
            project_id=self.project_id,
            default_locale=self.default_locale,
            values=dict(self.values),
            stamps=dict(self.stamps),
            boards={k: v.clone() for k, v in self.boards.items()},
            notes={k: v.clone() for k, v in self.notes.items()},
            connections={
                pair: dict(records) for pair, records in self.connections.items()
            },
            chat={k: dict(v) for k, v in self.chat.items()},
            note_tombstones=set(self.note_tombstones),
            conn_tombstones=set(self.conn_tombstones),
        )


def make_project(
    project_id: str, title: str = "", default_locale: str = "en"
) -> Project:
    """Fresh empty project; title/stage carry the zero stamp so any op wins."""
    project = Project(project_id=project_id, default_locale=default_locale)
    project.values = {"stage": "preparation", "title": title}
    project.stamps = {"stage": ZERO_STAMP, "title": ZERO_STAMP}
    return project


# --------------------------------------------------------------------------
# geometry


def clamp_size(size) -> tuple[float, float]:
    """Force a size into (0, 1] on each axis (oversize clamps to 1)."""
    w, h = size
    return (min(max(float(w), 1e-9), 1.0), min(max(float(h), 1e-9), 1.0))


def clamp_position(position, size) -> tuple[float, float]:
    """Pull a note's top-left corner inside the board for its size.

    Result satisfies x in [0, 1-w] and y in [0, 1-h]; identity when the
    rect already fits.
    """
    w, h = clamp_size(size)
    x, y = position
    x = min(max(float(x), 0.0), 1.0 - w)
    y = min(max(float(y), 0.0), 1.0 - h)
    return (x, y)


def region_of(kind: TemplateKind | str, position, size) -> str:
    """Region containing the note's center point.

    Boundary ties resolve to the earliest region in the layout table, which
    is the lowest region index.
    """
    w, h = clamp_size(size)
    x, y = position
    cx = min(max(x + w / 2, 0.0), 1.0)
    cy = min(max(y + h / 2, 0.0), 1.0)
    regions = layout(kind)
    for region in regions:
        rx, ry, rw, rh = region.rect
        if rx <= cx <= rx + rw and ry <= cy <= ry + rh:
            return region.region_id
    return regions[-1].region_id  # float dust at the far edge


def transitional(kind: TemplateKind | str, position, size) -> bool:
    """True when the note's rect overlaps more than one region's interior.

    On a kanban board this marks a task sitting between two columns.
    """
    w, h = clamp_size(size)
    x, y = clamp_position(position, (w, h))
    touched = 0
    for region in layout(kind):
        rx, ry, rw, rh = region.rect
        overlap_w = min(x + w, rx + rw) - max(x, rx)
        overlap_h = min(y + h, ry + rh) - max(y, ry)
        if overlap_w > 1e-12 and overlap_h > 1e-12:
            touched += 1
            if touched > 1:
                return True
    return False


# --------------------------------------------------------------------------
# observable accessors (clamped, defaulted views over raw LWW state)


def note_size(note: NoteRec) -> tuple[float, float]:
    return clamp_size(note.values.get("size", DEFAULT_NOTE_SIZE))


def note_position(note: NoteRec) -> tuple[float, float]:
    return clamp_position(note.values.get("position", (0.0, 0.0)), note_size(note))


def board_visible(project: Project, board_id: str) -> bool:
    rec = project.boards.get(board_id)
    return rec is not None and rec.created is not None


def note_alive(project: Project, note_id: str) -> bool:
    rec = project.notes.get(note_id)
    return (
        rec is not None
        and rec.created is not None
        and rec.board_id is not None
        and board_visible(project, rec.board_id)
    )


def board_order(project: Project) -> list[BoardRec]:
    """Visible boards in creation-stamp order (the replicated board order)."""
    boards = [b for b in project.boards.values() if b.created is not None]
    boards.sort(key=lambda b: b.created)
    return boards


def visible_notes(project: Project, board_id: str) -> list[NoteRec]:
    notes = [
        n
        for n in project.notes.values()
        if n.created is not None and n.board_id == board_id
    ]
    notes.sort(key=lambda n: n.note_id)
    return notes


def note_attachments(note: NoteRec) -> list[dict]:
    """Live attachments as [{id, label, url}], sorted by add id."""
    return [
        {"id": aid, **note.attachments[aid]} for aid in sorted(note.attachments)
    ]


def note_nav_refs(note: NoteRec) -> list[dict]:
    """Live nav references as [{id, target}], sorted by add id."""
    return [
        {"id": rid, "target": dict(note.nav_refs[rid])}
        for rid in sorted(note.nav_refs)
    ]


def visible_connections(project: Project, board_id: str) -> list[ConnRec]:
    """Observable connections of a board: one max-stamp winner per pair."""
    out = []
    for records in project.connections.values():
        winner = max(records.values(), key=lambda r: r.stamp)
        if winner.board_id != board_id:
            continue
        if note_alive(project, winner.from_note) and note_alive(
            project, winner.to_note
        ):
            out.append(winner)
    out.sort(key=lambda r: r.connection_id)
    return out


def chat_messages(project: Project) -> list[dict]:
    """Chat log ordered by stamp: [{author, stamp, text}]."""
    return [
        {"author": project.chat[stamp]["author"], "stamp": stamp, "text": project.chat[stamp]["text"]}
        for stamp in sorted(project.chat)
    ]


# --------------------------------------------------------------------------
# transition function


def _lww(values: dict, stamps: dict, name: str, value, stamp: Stamp) -> None:
    current = stamps.get(name)
    if current is None or stamp > current:
        values[name] = value
        stamps[name] = stamp


def _board_rec(project: Project, board_id: str) -> BoardRec:
    rec = project.boards.get(board_id)
    if rec is None:
        rec = BoardRec(board_id=board_id)
        project.boards[board_id] = rec
    return rec


def _note_rec(project: Project, note_id: str) -> NoteRec | None:
    """Record for edits; None when the note is tombstoned (delete wins)."""
    if note_id in project.note_tombstones:
        return None
    rec = project.notes.get(note_id)
    if rec is None:
        rec = NoteRec(note_id=note_id)
        project.notes[note_id] = rec
    return rec


def _create_board(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _board_rec(project, board_id_for(stamp))
    if rec.created is not None:
        return
    rec.created = stamp
    rec.kind = op["kind"]
    rec.technique = op.get("technique")
    _lww(rec.values, rec.stamps, "title", op["title"], stamp)
    _lww(rec.values, rec.stamps, "perspective", op["perspective"], stamp)


def _rename_board(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _board_rec(project, op["board"])
    _lww(rec.values, rec.stamps, "title", op["title"], stamp)


def _set_perspective(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _board_rec(project, op["board"])
    _lww(rec.values, rec.stamps, "perspective", op["perspective"], stamp)


def _create_note(project: Project, op: dict, stamp: Stamp) -> None:
    note_id = note_id_for(stamp)
    rec = _note_rec(project, note_id)
    if rec is None or rec.created is not None:
        return
    rec.created = stamp
    rec.board_id = op["board"]
    size = tuple(op["size"]) if "size" in op else DEFAULT_NOTE_SIZE
    _lww(rec.values, rec.stamps, "position", tuple(op["position"]), stamp)
    _lww(rec.values, rec.stamps, "size", size, stamp)
    _lww(rec.values, rec.stamps, "text", op["text"], stamp)
    _lww(rec.values, rec.stamps, "color", DEFAULT_COLOR, stamp)
    _lww(rec.values, rec.stamps, "highlighted", False, stamp)


def _edit_note_field(field_name: str, value_key: str, convert=None):
    def handler(project: Project, op: dict, stamp: Stamp) -> None:
        rec = _note_rec(project, op["note"])
        if rec is None:
            return
        value = op[value_key]
        if convert is not None:
            value = convert(value)
        _lww(rec.values, rec.stamps, field_name, value, stamp)

    return handler


def _delete_note(project: Project, op: dict, stamp: Stamp) -> None:
    note_id = op["note"]
    if note_id in project.note_tombstones:
        return
    project.note_tombstones.add(note_id)
    project.notes.pop(note_id, None)
    stale = [pair for pair in project.connections if note_id in pair]
    for pair in stale:
        del project.connections[pair]


def _create_connection(project: Project, op: dict, stamp: Stamp) -> None:
    connection_id = connection_id_for(stamp)
    if connection_id in project.conn_tombstones:
        return
    a, b = op["from_note"], op["to_note"]
    if a in project.note_tombstones or b in project.note_tombstones:
        return
    pair = (a, b) if a < b else (b, a)
    records = project.connections.setdefault(pair, {})
    if connection_id in records:
        return
    records[connection_id] = ConnRec(connection_id, op["board"], a, b, stamp)


def _delete_connection(project: Project, op: dict, stamp: Stamp) -> None:
    connection_id = op["connection"]
    if connection_id in project.conn_tombstones:
        return
    project.conn_tombstones.add(connection_id)
    for pair, records in list(project.connections.items()):
        if connection_id in records:
            del records[connection_id]
            if not records:
                del project.connections[pair]
            break


def _add_attachment(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _note_rec(project, op["note"])
    if rec is None:
        return
    attach_id = stamp.key()
    if attach_id in rec.removed_attachments or attach_id in rec.attachments:
        return
    rec.attachments[attach_id] = {"label": op["label"], "url": op["url"]}


def _remove_attachment(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _note_rec(project, op["note"])
    if rec is None:
        return
    attach_id = op["attachment"]
    rec.removed_attachments.add(attach_id)
    rec.attachments.pop(attach_id, None)


def _add_nav_ref(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _note_rec(project, op["note"])
    if rec is None:
        return
    ref_id = stamp.key()
    if ref_id in rec.removed_nav_refs or ref_id in rec.nav_refs:
        return
    rec.nav_refs[ref_id] = dict(op["target"])


def _remove_nav_ref(project: Project, op: dict, stamp: Stamp) -> None:
    rec = _note_rec(project, op["note"])
    if rec is None:
        return
    ref_id = op["ref"]
    rec.removed_nav_refs.add(ref_id)
    rec.nav_refs.pop(ref_id, None)


def _post_chat(project: Project, op: dict, stamp: Stamp) -> None:
    if stamp in project.chat:
        return
    project.chat[stamp] = {"author": op["client"], "text": op["text"]}


def _set_stage(project: Project, op: dict, stamp: Stamp) -> None:
    _lww(project.values, project.stamps, "stage", op["stage"], stamp)


def _set_project_title(project: Project, op: dict, stamp: Stamp) -> None:
    _lww(project.values, project.stamps, "title", op["title"], stamp)


_HANDLERS = {
    "create_board": _create_board,
    "rename_board": _rename_board,
    "set_perspective": _set_perspective,
    "create_note": _create_note,
    "edit_note_text": _edit_note_field("text", "text"),
    "move_note": _edit_note_field("position", "position", tuple),
    "resize_note": _edit_note_field("size", "size", tuple),
    "set_note_color": _edit_note_field("color", "color"),
    "set_highlight": _edit_note_field("highlighted", "highlighted", bool),
    "delete_note": _delete_note,
    "create_connection": _create_connection,
    "delete_connection": _delete_connection,
    "add_attachment": _add_attachment,
    "remove_attachment": _remove_attachment,
    "add_nav_ref": _add_nav_ref,
    "remove_nav_ref": _remove_nav_ref,
    "post_chat": _post_chat,
    "set_stage": _set_stage,
    "set_project_title": _set_project_title,
}


def apply_in_place(project: Project, op: dict) -> None:
    """Apply one op, mutating the document. Owner-confined replicas use this.

    Never raises for bad input: malformed ops and ops aimed at missing or
    deleted targets leave the document unchanged, so replicas cannot
    diverge on error handling.
    """
    if validate_op(op) is not None:
        return
    _HANDLERS[op["action"]](project, op, op_stamp(op))


def apply(project: Project, op: dict) -> Project:
    """Pure transition: returns the successor document, input untouched."""
    successor = project.clone()
    apply_in_place(successor, op)
    return successor


def collect_garbage(project: Project) -> None:
    """Drop tombstones, latent records and superseded connection records.

    Runs at snapshot compaction (and on export copies). Afterwards the
    document holds exactly its observable state: stragglers older than the
    snapshot can no longer be suppressed, which is the documented trade-off
    of bounded tombstone retention.
    """
    project.note_tombstones.clear()
    project.conn_tombstones.clear()
    for board_id in [b for b, rec in project.boards.items() if rec.created is None]:
        del project.boards[board_id]
    for note_id in [n for n, rec in project.notes.items() if rec.created is None]:
        del project.notes[note_id]
    for note in project.notes.values():
        note.removed_attachments.clear()
        note.removed_nav_refs.clear()
    survivors = {}
    for pair, records in project.connections.items():
        winner = max(records.values(), key=lambda r: r.stamp)
        if (
            board_visible(project, winner.board_id)
            and note_alive(project, winner.from_note)
            and note_alive(project, winner.to_note)
        ):
            survivors[pair] = {winner.connection_id: winner}
    project.connections = survivors


# --------------------------------------------------------------------------
# invariant checking


@dataclass(frozen=True, slots=True)
class Violation:
    rule: str
    subject: str
    detail: str


def validate(project: Project) -> list[Violation]:
    """Check every document invariant; empty result means all hold.

    Documents produced purely through apply always validate clean; a
    non-empty result flags state constructed or mutated by other means.
    """
    from .ops import COLORS  # palette lives with the op vocabulary

    violations: list[Violation] = []
    for records in project.connections.values():
        winner = max(records.values(), key=lambda r: r.stamp)
        if winner.from_note == winner.to_note:
            violations.append(
                Violation("self_connection", winner.connection_id, "loops to itself")
            )
            continue
        for endpoint in (winner.from_note, winner.to_note):
            rec = project.notes.get(endpoint)
            if rec is None or rec.created is None:
                violations.append(
                    Violation(
                        "dangling_connection",
                        winner.connection_id,
                        f"endpoint {endpoint} does not exist",
                    )
                )
            elif rec.board_id != winner.board_id:
                violations.append(
                    Violation(
                        "dangling_connection",
                        winner.connection_id,
                        f"endpoint {endpoint} lives on another board",
                    )
                )
    for note in project.notes.values():
        if note.created is None:
            continue
        x, y = note_position(note)
        w, h = note_size(note)
        if not (0.0 <= x <= 1.0 - w + 1e-12 and 0.0 <= y <= 1.0 - h + 1e-12):
            violations.append(
                Violation("out_of_bounds", note.note_id, f"rect ({x},{y},{w},{h})")
            )
        for field_name in NOTE_FIELDS:
            if field_name not in note.stamps:
                violations.append(
                    Violation("missing_field_stamp", note.note_id, field_name)
                )
        if note.values.get("color") not in COLORS:
            violations.append(
                Violation("bad_color", note.note_id, str(note.values.get("color")))
            )
        if note.board_id not in project.boards:
            violations.append(
                Violation("unknown_board", note.note_id, str(note.board_id))
            )
    return violations
