"""Scripted session replay with golden-file comparison.

A script drives named clients through a deterministic sequence of board
actions against an in-process host with immediate FIFO delivery. Entity
ids are derived from stamps, so the same script always produces the same
bytes; the shipped script's outputs are frozen as golden files and any
drift in them is a regression.
"""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass
from pathlib import Path

from . import ops
from .canonical import emit
from .hub import ProjectHost
from .model import Project, make_project
from .navigation import BoardTitlePoint, backlinks, jump_points
from .replication import ReplicaState
from .store import export_project
from .templates import check_transition

GOLDEN_FILES = ("export.json", "jump_points.json", "backlinks.json")


class ScenarioError(ValueError):
    """The script is malformed or references an unknown alias."""


@dataclass
class ScenarioResult:
    project: Project
    client_docs: dict[str, Project]
    export_bytes: bytes
    jump_points_jsonable: list
    backlinks_jsonable: dict
    aliases: dict[str, dict[str, str]]

    def golden_payloads(self) -> dict[str, bytes]:
        return {
            "export.json": self.export_bytes,
            "jump_points.json": emit(self.jump_points_jsonable).encode("utf-8"),
            "backlinks.json": emit(self.backlinks_jsonable).encode("utf-8"),
        }


def _jump_points_jsonable(project: Project) -> list:
    out = []
    for point in jump_points(project):
        if isinstance(point, BoardTitlePoint):
            out.append(
                {"board_id": point.board_id, "title": point.title, "type": "board_title"}
            )
        else:
            out.append(
                {
                    "board_id": point.board_id,
                    "note_id": point.note_id,
                    "preview": point.preview,
                    "type": "note",
                }
            )
    return out


def _backlinks_jsonable(project: Project) -> dict:
    from .model import board_order, note_alive

    boards = {}
    for board in board_order(project):
        boards[board.board_id] = [list(pair) for pair in backlinks(project, board.board_id)]
    notes = {}
    for note_id in sorted(project.notes):
        if not note_alive(project, note_id):
            continue
        note = project.notes[note_id]
        links = backlinks(project, note.board_id, note_id)
        if links:
            notes[note_id] = [list(pair) for pair in links]
    return {"boards": boards, "notes": notes}


class _Runner:
    def __init__(self, script: dict) -> None:
        for key in ("project_id", "clients", "steps"):
            if key not in script:
                raise ScenarioError(f"script is missing {key!r}")
        self.project_id = script["project_id"]
        title = script.get("title", "")
        locale = script.get("default_locale", "en")
        self.host = ProjectHost(make_project(self.project_id, title, locale))
        self.replicas: dict[str, ReplicaState] = {}
        for entry in script["clients"]:
            client = entry["id"]
            self.replicas[client] = ReplicaState(
                client, make_project(self.project_id, title, locale)
            )
            self.host.hello(client, 0, entry.get("locale", "en"))
        self.aliases: dict[str, dict[str, str]] = {
            "board": {},
            "note": {},
            "connection": {},
            "attachment": {},
            "ref": {},
        }
        self.steps = script["steps"]

    def _lookup(self, namespace: str, alias) -> str:
        try:
            return self.aliases[namespace][alias]
        except KeyError:
            raise ScenarioError(f"unknown {namespace} alias {alias!r}") from None

    def _bind(self, namespace: str, alias, real_id: str) -> None:
        if alias is None:
            return
        if alias in self.aliases[namespace]:
            raise ScenarioError(f"duplicate {namespace} alias {alias!r}")
        self.aliases[namespace][alias] = real_id

    def _send(self, client: str, op: dict) -> None:
        routed = self.host.handle_op(client, {"t": "op", "op": op})
        for target, message in routed:
            if message.get("t") == "error":
                raise ScenarioError(f"host rejected step: {message}")
            if target == "*" and message.get("t") == "op":
                for replica in self.replicas.values():
                    replica.integrate(message["op"])

    def run(self) -> ScenarioResult:
        for index, step in enumerate(self.steps):
            try:
                self._step(step)
            except (KeyError, TypeError, ValueError) as exc:
                if isinstance(exc, ScenarioError):
                    raise ScenarioError(f"step {index}: {exc}") from None
                raise ScenarioError(f"step {index}: {exc!r}") from exc
        project = self.host.doc
        return ScenarioResult(
            project=project,
            client_docs={c: r.doc for c, r in self.replicas.items()},
            export_bytes=export_project(project),
            jump_points_jsonable=_jump_points_jsonable(project),
            backlinks_jsonable=_backlinks_jsonable(project),
            aliases=self.aliases,
        )

    def _step(self, step: dict) -> None:
        client = step["client"]
        replica = self.replicas.get(client)
        if replica is None:
            raise ScenarioError(f"unknown client {client!r}")
        action = step["action"]

        if action == "create_board":
            op = replica.emit(
                ops.create_board,
                step["kind"],
                step["title"],
                step.get("perspective", "overview"),
                step.get("technique"),
            )
            self._bind("board", step.get("alias"), ops.board_id_for(ops.op_stamp(op)))
        elif action == "rename_board":
            op = replica.emit(
                ops.rename_board, self._lookup("board", step["board"]), step["title"]
            )
        elif action == "set_perspective":
            op = replica.emit(
                ops.set_perspective,
                self._lookup("board", step["board"]),
                step["perspective"],
            )
        elif action == "create_note":
            op = replica.emit(
                ops.create_note,
                self._lookup("board", step["board"]),
                tuple(step["position"]),
                step["text"],
                tuple(step["size"]) if "size" in step else None,
            )
            self._bind("note", step.get("alias"), ops.note_id_for(ops.op_stamp(op)))
        elif action == "edit_text":
            op = replica.emit(
                ops.edit_note_text, self._lookup("note", step["note"]), step["text"]
            )
        elif action == "move_note":
            op = replica.emit(
                ops.move_note, self._lookup("note", step["note"]), tuple(step["position"])
            )
        elif action == "resize_note":
            op = replica.emit(
                ops.resize_note, self._lookup("note", step["note"]), tuple(step["size"])
            )
        elif action == "set_color":
            op = replica.emit(
                ops.set_note_color, self._lookup("note", step["note"]), step["color"]
            )
        elif action == "highlight":
            op = replica.emit(
                ops.set_highlight, self._lookup("note", step["note"]), bool(step["on"])
            )
        elif action == "delete_note":
            op = replica.emit(ops.delete_note, self._lookup("note", step["note"]))
        elif action == "connect":
            op = replica.emit(
                ops.create_connection,
                self._lookup("board", step["board"]),
                self._lookup("note", step["from"]),
                self._lookup("note", step["to"]),
            )
            self._bind(
                "connection", step.get("alias"), ops.connection_id_for(ops.op_stamp(op))
            )
        elif action == "disconnect":
            op = replica.emit(
                ops.delete_connection, self._lookup("connection", step["connection"])
            )
        elif action == "attach":
            op = replica.emit(
                ops.add_attachment,
                self._lookup("note", step["note"]),
                step["url"],
                step.get("label", ""),
            )
            self._bind("attachment", step.get("alias"), ops.op_stamp(op).key())
        elif action == "detach":
            op = replica.emit(
                ops.remove_attachment,
                self._lookup("note", step["note"]),
                self._lookup("attachment", step["attachment"]),
            )
        elif action == "link_board":
            op = replica.emit(
                ops.add_nav_ref,
                self._lookup("note", step["note"]),
                ops.nav_block_title(self._lookup("board", step["board"])),
            )
            self._bind("ref", step.get("alias"), ops.op_stamp(op).key())
        elif action == "link_note":
            target_id = self._lookup("note", step["target"])
            target_board = self.host.doc.notes[target_id].board_id
            op = replica.emit(
                ops.add_nav_ref,
                self._lookup("note", step["note"]),
                ops.nav_note(target_board, target_id),
            )
            self._bind("ref", step.get("alias"), ops.op_stamp(op).key())
        elif action == "link_external":
            op = replica.emit(
                ops.add_nav_ref,
                self._lookup("note", step["note"]),
                ops.nav_external(step["url"]),
            )
            self._bind("ref", step.get("alias"), ops.op_stamp(op).key())
        elif action == "unlink":
            op = replica.emit(
                ops.remove_nav_ref,
                self._lookup("note", step["note"]),
                self._lookup("ref", step["ref"]),
            )
        elif action == "chat":
            op = replica.emit(ops.post_chat, step["text"])
        elif action == "advance_stage":
            current = self.host.doc.values.get("stage", "preparation")
            check_transition(current, step["stage"])  # scripts must stay valid
            op = replica.emit(ops.set_stage, step["stage"])
        elif action == "set_title":
            op = replica.emit(ops.set_project_title, step["title"])
        else:
            raise ScenarioError(f"unknown action {action!r}")
        self._send(client, op)


def run_script(script: dict) -> ScenarioResult:
    return _Runner(script).run()


def run_script_file(path: Path | str) -> ScenarioResult:
    script = json.loads(Path(path).read_text(encoding="utf-8"))
    return run_script(script)


def compare_with_golden(
    result: ScenarioResult, golden_dir: Path | str, update: bool = False
) -> list[str]:
    """Diff the result against frozen goldens; returns one entry per mismatch.

    With update=True the goldens are (re)written and the list is empty.
    """
    golden_dir = Path(golden_dir)
    payloads = result.golden_payloads()
    if update:
        golden_dir.mkdir(parents=True, exist_ok=True)
        for name, payload in payloads.items():
            (golden_dir / name).write_bytes(payload)
        return []
    mismatches = []
    for name, payload in payloads.items():
        path = golden_dir / name
        if not path.is_file():
            mismatches.append(f"{name}: golden file missing at {path}")
            continue
        frozen = path.read_bytes()
        if frozen != payload:
            diff = "\n".join(
                difflib.unified_diff(
                    frozen.decode("utf-8").splitlines(),
                    payload.decode("utf-8").splitlines(),
                    fromfile=f"golden/{name}",
                    tofile=f"replay/{name}",
                    lineterm="",
                )
            )
            mismatches.append(f"{name}: differs from golden\n{diff}")
    return mismatches
