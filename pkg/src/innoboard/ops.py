"""Operation vocabulary: builders and wire-shape validation.

Operations are plain JSON-able dicts. Every op carries its stamp inline
("lamport" + "client") and an "action" naming the payload; remaining keys
are the payload arguments. Ids of created entities are derived from the
creating op's stamp, so they are globally unique without coordination.
"""

from __future__ import annotations

import math
from urllib.parse import urlparse

from .stamps import Stamp
from .templates import InnovationStage, Perspective, TechniqueTag, TemplateKind

COLORS = ("yellow", "green", "blue", "pink", "orange", "gray")
DEFAULT_COLOR = "yellow"

ACTIONS = frozenset(
    {
        "create_board",
        "rename_board",
        "set_perspective",
        "create_note",
        "edit_note_text",
        "move_note",
        "resize_note",
        "set_note_color",
        "set_highlight",
        "delete_note",
        "create_connection",
        "delete_connection",
        "add_attachment",
        "remove_attachment",
        "add_nav_ref",
        "remove_nav_ref",
        "post_chat",
        "set_stage",
        "set_project_title",
    }
)


def op_stamp(op: dict) -> Stamp:
    return Stamp(op["lamport"], op["client"])


def board_id_for(stamp: Stamp) -> str:
    return f"b{stamp.key()}"


def note_id_for(stamp: Stamp) -> str:
    return f"n{stamp.key()}"


def connection_id_for(stamp: Stamp) -> str:
    return f"c{stamp.key()}"


def quantize(x: float) -> float:
    """Round to 9 significant digits, the precision canonical output keeps.

    Ops carry pre-quantized coordinates so a replica reloaded from a
    snapshot holds bit-identical values to one that never restarted.
    """
    return float(f"{float(x):.9g}")


def _base(stamp: Stamp, action: str) -> dict:
    return {"lamport": stamp.lamport, "client": stamp.client, "action": action}


def create_board(
    stamp: Stamp,
    kind: TemplateKind | str,
    title: str,
    perspective: Perspective | str = Perspective.OVERVIEW,
    technique: TechniqueTag | str | None = None,
) -> dict:
    op = _base(stamp, "create_board")
    op["kind"] = TemplateKind(kind).value
    op["title"] = title
    op["perspective"] = Perspective(perspective).value
    if technique is not None:
        op["technique"] = TechniqueTag(technique).value
    return op


def rename_board(stamp: Stamp, board: str, title: str) -> dict:
    return {**_base(stamp, "rename_board"), "board": board, "title": title}


def set_perspective(stamp: Stamp, board: str, perspective: Perspective | str) -> dict:
    return {
        **_base(stamp, "set_perspective"),
        "board": board,
        "perspective": Perspective(perspective).value,
    }


def create_note(
    stamp: Stamp,
    board: str,
    position: tuple[float, float],
    text: str,
    size: tuple[float, float] | None = None,
) -> dict:
    op = _base(stamp, "create_note")
    op["board"] = board
    op["position"] = [quantize(position[0]), quantize(position[1])]
    op["text"] = text
    if size is not None:
        op["size"] = [quantize(size[0]), quantize(size[1])]
    return op


def edit_note_text(stamp: Stamp, note: str, text: str) -> dict:
    return {**_base(stamp, "edit_note_text"), "note": note, "text": text}


def move_note(stamp: Stamp, note: str, position: tuple[float, float]) -> dict:
    return {
        **_base(stamp, "move_note"),
        "note": note,
        "position": [quantize(position[0]), quantize(position[1])],
    }


def resize_note(stamp: Stamp, note: str, size: tuple[float, float]) -> dict:
    return {
        **_base(stamp, "resize_note"),
        "note": note,
        "size": [quantize(size[0]), quantize(size[1])],
    }


def set_note_color(stamp: Stamp, note: str, color: str) -> dict:
    if color not in COLORS:
        raise ValueError(f"unknown color {color!r}")
    return {**_base(stamp, "set_note_color"), "note": note, "color": color}


def set_highlight(stamp: Stamp, note: str, highlighted: bool) -> dict:
    return {
        **_base(stamp, "set_highlight"),
        "note": note,
        "highlighted": bool(highlighted),
    }


def delete_note(stamp: Stamp, note: str) -> dict:
    return {**_base(stamp, "delete_note"), "note": note}


def create_connection(stamp: Stamp, board: str, from_note: str, to_note: str) -> dict:
    return {
        **_base(stamp, "create_connection"),
        "board": board,
        "from_note": from_note,
        "to_note": to_note,
    }


def delete_connection(stamp: Stamp, connection: str) -> dict:
    return {**_base(stamp, "delete_connection"), "connection": connection}


def add_attachment(stamp: Stamp, note: str, url: str, label: str) -> dict:
    return {**_base(stamp, "add_attachment"), "note": note, "url": url, "label": label}


def remove_attachment(stamp: Stamp, note: str, attachment: str) -> dict:
    return {
        **_base(stamp, "remove_attachment"),
        "note": note,
        "attachment": attachment,
    }


def nav_note(board_id: str, note_id: str) -> dict:
    return {"kind": "note", "board_id": board_id, "note_id": note_id}


def nav_block_title(board_id: str) -> dict:
    return {"kind": "block_title", "board_id": board_id}


def nav_external(url: str) -> dict:
    return {"kind": "external", "url": url}


def add_nav_ref(stamp: Stamp, note: str, target: dict) -> dict:
    return {**_base(stamp, "add_nav_ref"), "note": note, "target": dict(target)}


def remove_nav_ref(stamp: Stamp, note: str, ref: str) -> dict:
    return {**_base(stamp, "remove_nav_ref"), "note": note, "ref": ref}


def post_chat(stamp: Stamp, text: str) -> dict:
    return {**_base(stamp, "post_chat"), "text": text}


def set_stage(stamp: Stamp, stage: InnovationStage | str) -> dict:
    return {**_base(stamp, "set_stage"), "stage": InnovationStage(stage).value}


def set_project_title(stamp: Stamp, title: str) -> dict:
    return {**_base(stamp, "set_project_title"), "title": title}


def is_absolute_uri(url) -> bool:
    if not isinstance(url, str) or not url:
        return False
    parsed = urlparse(url)
    return bool(parsed.scheme) and bool(parsed.netloc or parsed.path)


def _finite_pair(value) -> bool:
    return (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        and all(math.isfinite(v) for v in value)
    )


def _size_pair(value) -> bool:
    return _finite_pair(value) and all(0.0 < v <= 1.0 for v in value)


_ENUMS = {
    "kind": {k.value for k in TemplateKind},
    "perspective": {p.value for p in Perspective},
    "stage": {s.value for s in InnovationStage},
    "technique": {t.value for t in TechniqueTag},
    "color": set(COLORS),
}

# Per action: (field, checker) pairs that must all pass. A checker returning
# False marks the whole op malformed.
_STR = lambda v: isinstance(v, str) and v != ""
_TEXT = lambda v: isinstance(v, str)
_BOOL = lambda v: isinstance(v, bool)

_SHAPES: dict[str, list[tuple[str, object]]] = {
    "create_board": [
        ("kind", lambda v: v in _ENUMS["kind"]),
        ("title", _TEXT),
        ("perspective", lambda v: v in _ENUMS["perspective"]),
    ],
    "rename_board": [("board", _STR), ("title", _TEXT)],
    "set_perspective": [
        ("board", _STR),
        ("perspective", lambda v: v in _ENUMS["perspective"]),
    ],
    "create_note": [("board", _STR), ("position", _finite_pair), ("text", _TEXT)],
    "edit_note_text": [("note", _STR), ("text", _TEXT)],
    "move_note": [("note", _STR), ("position", _finite_pair)],
    "resize_note": [("note", _STR), ("size", _size_pair)],
    "set_note_color": [("note", _STR), ("color", lambda v: v in _ENUMS["color"])],
    "set_highlight": [("note", _STR), ("highlighted", _BOOL)],
    "delete_note": [("note", _STR)],
    "create_connection": [("board", _STR), ("from_note", _STR), ("to_note", _STR)],
    "delete_connection": [("connection", _STR)],
    "add_attachment": [("note", _STR), ("url", is_absolute_uri), ("label", _TEXT)],
    "remove_attachment": [("note", _STR), ("attachment", _STR)],
    "add_nav_ref": [("note", _STR)],
    "remove_nav_ref": [("note", _STR), ("ref", _STR)],
    "post_chat": [("text", _TEXT)],
    "set_stage": [("stage", lambda v: v in _ENUMS["stage"])],
    "set_project_title": [("title", _TEXT)],
}


def _valid_nav_target(target) -> bool:
    if not isinstance(target, dict):
        return False
    kind = target.get("kind")
    if kind == "note":
        return _STR(target.get("board_id")) and _STR(target.get("note_id"))
    if kind == "block_title":
        return _STR(target.get("board_id"))
    if kind == "external":
        return is_absolute_uri(target.get("url"))
    return False


def validate_op(op) -> str | None:
    """Return a human-readable defect for a malformed op, or None if valid."""
    if not isinstance(op, dict):
        return "op must be an object"
    lamport = op.get("lamport")
    if not isinstance(lamport, int) or isinstance(lamport, bool) or lamport < 1:
        return "lamport must be a positive integer"
    if not _STR(op.get("client")):
        return "client must be a non-empty string"
    action = op.get("action")
    if action not in ACTIONS:
        return f"unknown action {action!r}"
    for field, check in _SHAPES[action]:
        if field not in op:
            return f"{action}: missing field {field!r}"
        if not check(op[field]):
            return f"{action}: bad value for {field!r}"
    if action == "create_note" and "size" in op and not _size_pair(op["size"]):
        return "create_note: bad value for 'size'"
    if action == "create_board" and "technique" in op:
        if op["technique"] is not None and op["technique"] not in _ENUMS["technique"]:
            return "create_board: bad value for 'technique'"
    if action == "create_connection" and op["from_note"] == op["to_note"]:
        return "create_connection: endpoints must differ"
    if action == "add_nav_ref" and not _valid_nav_target(op.get("target")):
        return "add_nav_ref: bad value for 'target'"
    return None
