"""Transport-free sync server core.

One ProjectHost owns one project: it sequences incoming ops into the
project log, persists them ahead of any broadcast, folds them into the
server replica and fans out wire messages. Methods return a routing list
of (target, message) pairs, where target is a client id, "*" for every
registered session, or None for the calling connection; the transport
layer (websockets, simulator, scripted replay) does the actual delivery.
"""

from __future__ import annotations

import secrets
import string
from dataclasses import dataclass

from .canonical import project_to_jsonable
from .model import Project, make_project
from .ops import op_stamp, validate_op
from .replication import ReplicaState
from .store import DEFAULT_COMPACT_THRESHOLD, ProjectStore, StorageError

TOKEN_ALPHABET = string.ascii_uppercase + string.ascii_lowercase + string.digits
TOKEN_LENGTH = 22

Routed = list[tuple[str | None, dict]]


def new_token() -> str:
    return "".join(secrets.choice(TOKEN_ALPHABET) for _ in range(TOKEN_LENGTH))


def error_message(code: str, detail: str) -> dict:
    return {"t": "error", "code": code, "detail": detail}


@dataclass
class Session:
    client: str
    locale: str
    last_acked_seq: int = 0


class ProjectHost:
    def __init__(
        self,
        project: Project,
        store: ProjectStore | None = None,
        compact_threshold: int = DEFAULT_COMPACT_THRESHOLD,
        base_seq: int = 0,
        log: list[dict] | None = None,
    ) -> None:
        self.project_id = project.project_id
        self.replica = ReplicaState("#server", project)
        self.store = store
        self.compact_threshold = compact_threshold
        self.base_seq = base_seq  # seq already folded into the snapshot
        self.log: list[dict] = list(log or [])  # ops base_seq+1 .. head_seq
        self.seq_by_opid: dict[str, int] = {}
        for i, op in enumerate(self.log):
            op_id = op_stamp(op).key()
            self.seq_by_opid[op_id] = base_seq + i + 1
            self.replica.applied.add(op_id)
        self.sessions: dict[str, Session] = {}

    @classmethod
    def from_store(
        cls,
        store: ProjectStore,
        project_id: str,
        compact_threshold: int = DEFAULT_COMPACT_THRESHOLD,
    ) -> "ProjectHost":
        project, snapshot_seq, tail = store.load(project_id)
        return cls(
            project,
            store=store,
            compact_threshold=compact_threshold,
            base_seq=snapshot_seq,
            log=[op for _, op in tail],
        )

    @property
    def doc(self) -> Project:
        return self.replica.doc

    @property
    def head_seq(self) -> int:
        return self.base_seq + len(self.log)

    # -- outgoing message builders -----------------------------------------

    def snapshot_message(self) -> dict:
        return {
            "t": "snapshot",
            "seq": self.head_seq,
            "doc": project_to_jsonable(self.doc),
        }

    def op_message(self, seq: int, op: dict) -> dict:
        return {"t": "op", "seq": seq, "op": op}

    def presence_message(self) -> dict:
        return {
            "t": "presence",
            "clients": [
                {"client": s.client, "locale": s.locale}
                for s in sorted(self.sessions.values(), key=lambda s: s.client)
            ],
        }

    def catchup_messages(self, last_seq: int) -> list[dict]:
        """Replay (last_seq, head] in order; first contact (last_seq 0), a
        gap reaching into compacted history, or a seq that is not ours gets
        a full snapshot instead."""
        if last_seq == 0 or last_seq < self.base_seq or last_seq > self.head_seq:
            return [self.snapshot_message()]
        return [
            self.op_message(self.base_seq + i + 1, op)
            for i, op in enumerate(self.log)
            if self.base_seq + i + 1 > last_seq
        ]

    # -- session handling ----------------------------------------------------

    def hello(self, client: str, last_seq: int, locale: str) -> tuple[bool, Routed]:
        """Register a session; returns (joined, messages to deliver)."""
        if client in self.sessions:
            return False, [
                (None, error_message("client_id_taken", f"{client} is connected"))
            ]
        routed: Routed = [(None, msg) for msg in self.catchup_messages(last_seq)]
        self.sessions[client] = Session(
            client=client, locale=locale, last_acked_seq=self.head_seq
        )
        routed.append(("*", self.presence_message()))
        return True, routed

    def leave(self, client: str) -> Routed:
        if self.sessions.pop(client, None) is None:
            return []
        return [("*", self.presence_message())]

    def presence(self) -> list[tuple[str, str]]:
        return [
            (s.client, s.locale)
            for s in sorted(self.sessions.values(), key=lambda s: s.client)
        ]

    def resync(self, client: str, from_seq: int) -> Routed:
        return [(None, msg) for msg in self.catchup_messages(from_seq)]

    def handle_op(self, client: str, message: dict) -> Routed:
        """Sequence, persist, integrate and broadcast one client op.

        The sender receives the broadcast too; that echo is its ack.
        Duplicates are acked with their original seq but not re-appended.
        """
        if client not in self.sessions:
            return [(None, error_message("bad_op", "send hello before ops"))]
        claimed = message.get("project")
        if claimed is not None and claimed != self.project_id:
            return [
                (None, error_message("wrong_project", f"op addressed to {claimed}"))
            ]
        op = message.get("op")
        defect = validate_op(op)
        if defect is not None:
            return [(None, error_message("bad_op", defect))]
        op_id = op_stamp(op).key()
        known_seq = self.seq_by_opid.get(op_id)
        if known_seq is not None:
            return [(None, self.op_message(known_seq, op))]
        seq = self.head_seq + 1
        if self.store is not None:
            try:
                self.store.append(self.project_id, seq, op)  # ahead of broadcast
            except StorageError as exc:
                return [(None, error_message("storage_error", str(exc)))]
        self.log.append(op)
        self.seq_by_opid[op_id] = seq
        self.replica.integrate(op)
        for session in self.sessions.values():
            session.last_acked_seq = seq
        routed: Routed = [("*", self.op_message(seq, op))]
        if self.store is not None and len(self.log) >= self.compact_threshold:
            self.compact()
        return routed

    def compact(self) -> None:
        """Snapshot the current state and truncate the retained log."""
        if self.store is None:
            return
        self.store.compact(self.project_id, self.doc, self.head_seq)
        self.base_seq = self.head_seq
        self.log = []


class Hub:
    """Registry of live project hosts backed by an optional store."""

    def __init__(
        self,
        store: ProjectStore | None = None,
        compact_threshold: int = DEFAULT_COMPACT_THRESHOLD,
    ) -> None:
        self.store = store
        self.compact_threshold = compact_threshold
        self.hosts: dict[str, ProjectHost] = {}

    def create_project(self, title: str, default_locale: str = "en") -> str:
        """Mint a fresh joinable project; nothing leaks if persistence fails."""
        token = new_token()
        while (self.store is not None and self.store.exists(token)) or token in self.hosts:
            token = new_token()
        project = make_project(token, title=title, default_locale=default_locale)
        if self.store is not None:
            self.store.create(token, project)
        self.hosts[token] = ProjectHost(
            project, store=self.store, compact_threshold=self.compact_threshold
        )
        return token

    def get(self, project_id: str) -> ProjectHost | None:
        host = self.hosts.get(project_id)
        if host is not None:
            return host
        if self.store is not None and self.store.exists(project_id):
            host = ProjectHost.from_store(
                self.store, project_id, compact_threshold=self.compact_threshold
            )
            self.hosts[project_id] = host
            return host
        return None
