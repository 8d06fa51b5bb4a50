"""Deterministic multi-client convergence simulator.

Spawns N in-process clients against an in-process host, each emitting
random valid ops, with message delays, reorderings and duplications drawn
from a seeded generator over logical time. No wall clock, no threads: the
same seed replays the same schedule bit for bit. After quiescence every
replica's canonical hash must equal the stamp-order oracle's; a mismatch
is the primary regression alarm for the whole replication design.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

from . import ops
from .canonical import canonical_hash
from .hub import ProjectHost
from .model import (
    board_order,
    make_project,
    note_alive,
    visible_connections,
    visible_notes,
)
from .replication import ReplicaState, oracle_replay
from .templates import STAGE_ORDER, InnovationStage, Perspective, TemplateKind

DELAY_MODELS = ("none", "uniform", "adversarial")
MAX_UNIFORM_DELAY = 50
REORDER_BUFFER = 4
DUPLICATE_RATE = 0.08
MAX_BOARDS = 4

_KINDS = [k.value for k in TemplateKind]
_COLORS = list(ops.COLORS)
_LOCALES = ["en", "de", "fi"]


@dataclass
class ConvergenceReport:
    seed: int
    clients: int
    ops_per_client: int
    delay_model: str
    converged: bool
    oracle_hash: str
    replica_hashes: dict[str, str]
    ops_total: int
    deliveries: int
    duplicates: int

    def to_jsonable(self) -> dict:
        return {
            "clients": self.clients,
            "converged": self.converged,
            "delay_model": self.delay_model,
            "deliveries": self.deliveries,
            "duplicates": self.duplicates,
            "ops_per_client": self.ops_per_client,
            "ops_total": self.ops_total,
            "oracle_hash": self.oracle_hash,
            "replica_hashes": dict(sorted(self.replica_hashes.items())),
            "seed": self.seed,
        }


class _Scheduler:
    """Logical-time event heap; ties resolve in scheduling order."""

    def __init__(self) -> None:
        self.now = 0
        self._heap: list = []
        self._counter = 0

    def at(self, delay: int, fn, *args) -> None:
        self._counter += 1
        heapq.heappush(self._heap, (self.now + delay, self._counter, fn, args))

    def drain(self) -> None:
        while self._heap:
            when, _, fn, args = heapq.heappop(self._heap)
            self.now = when
            fn(*args)

    @property
    def empty(self) -> bool:
        return not self._heap


class _Link:
    """One direction of one channel, applying the configured delay model."""

    def __init__(self, scheduler: _Scheduler, rng: random.Random, model: str, deliver):
        self.scheduler = scheduler
        self.rng = rng
        self.model = model
        self.deliver = deliver
        self.buffer: list = []
        self.duplicates = 0

    def send(self, message: dict) -> None:
        if self.model == "none":
            self.scheduler.at(1, self.deliver, message)
            return
        if self.model == "uniform":
            self.scheduler.at(self.rng.randint(0, MAX_UNIFORM_DELAY), self.deliver, message)
            if self.rng.random() < DUPLICATE_RATE:
                self.duplicates += 1
                self.scheduler.at(
                    self.rng.randint(1, MAX_UNIFORM_DELAY), self.deliver, message
                )
            return
        # adversarial: hold messages and release each full buffer reversed
        self.buffer.append(message)
        if self.rng.random() < DUPLICATE_RATE:
            self.duplicates += 1
            self.buffer.append(message)
        if len(self.buffer) >= REORDER_BUFFER:
            self.flush()

    def flush(self) -> None:
        for i, message in enumerate(reversed(self.buffer)):
            self.scheduler.at(1 + i, self.deliver, message)
        self.buffer.clear()


class _SimClient:
    """In-process collaborator emitting random valid ops for its replica view."""

    def __init__(self, client_id: str, project_id: str, title: str) -> None:
        self.replica = ReplicaState(client_id, make_project(project_id, title=title))
        self.serial = 0

    def emit_random(self, rng: random.Random) -> dict:
        doc = self.replica.doc
        emit = self.replica.emit
        self.serial += 1
        boards = [b.board_id for b in board_order(doc)]
        if not boards:
            return emit(
                ops.create_board,
                rng.choice(_KINDS),
                f"{self.replica.client} board {self.serial}",
            )
        notes = sorted(n for n in doc.notes if note_alive(doc, n))

        def random_position():
            # Slight overshoot so clamping gets exercised.
            return (rng.random() * 1.1 - 0.05, rng.random() * 1.1 - 0.05)

        def fallback_create():
            return emit(
                ops.create_note,
                rng.choice(boards),
                random_position(),
                f"{self.replica.client} note {self.serial}",
            )

        action = rng.choices(_ACTIONS, weights=_WEIGHTS)[0]

        if action == "create_note" or (not notes and action in _NEEDS_NOTE):
            return fallback_create()
        if action == "create_board":
            if len(boards) >= MAX_BOARDS:
                return fallback_create()
            return emit(
                ops.create_board,
                rng.choice(_KINDS),
                f"{self.replica.client} board {self.serial}",
            )
        if action == "rename_board":
            return emit(ops.rename_board, rng.choice(boards), f"renamed {self.serial}")
        if action == "set_perspective":
            return emit(
                ops.set_perspective,
                rng.choice(boards),
                rng.choice([p.value for p in Perspective]),
            )
        if action == "move_note":
            return emit(ops.move_note, rng.choice(notes), random_position())
        if action == "edit_note_text":
            return emit(
                ops.edit_note_text, rng.choice(notes), f"edited {self.serial}"
            )
        if action == "resize_note":
            size = (rng.uniform(0.02, 0.4), rng.uniform(0.02, 0.4))
            return emit(ops.resize_note, rng.choice(notes), size)
        if action == "set_note_color":
            return emit(ops.set_note_color, rng.choice(notes), rng.choice(_COLORS))
        if action == "set_highlight":
            return emit(ops.set_highlight, rng.choice(notes), rng.random() < 0.5)
        if action == "delete_note":
            return emit(ops.delete_note, rng.choice(notes))
        if action == "create_connection":
            crowded = [b for b in boards if len(visible_notes(doc, b)) >= 2]
            if not crowded:
                return fallback_create()
            board = rng.choice(crowded)
            a, b = rng.sample([n.note_id for n in visible_notes(doc, board)], 2)
            return emit(ops.create_connection, board, a, b)
        if action == "delete_connection":
            connections = [
                rec.connection_id
                for board in boards
                for rec in visible_connections(doc, board)
            ]
            if not connections:
                return fallback_create()
            return emit(ops.delete_connection, rng.choice(sorted(connections)))
        if action == "add_attachment":
            return emit(
                ops.add_attachment,
                rng.choice(notes),
                f"https://cloud.example.com/{self.replica.client}/{self.serial}.pdf",
                f"file {self.serial}",
            )
        if action == "remove_attachment":
            attached = sorted(
                (n, aid)
                for n in notes
                for aid in doc.notes[n].attachments
            )
            if not attached:
                return fallback_create()
            note, aid = attached[rng.randrange(len(attached))]
            return emit(ops.remove_attachment, note, aid)
        if action == "add_nav_ref":
            roll = rng.random()
            if roll < 0.4:
                target = ops.nav_block_title(rng.choice(boards))
            elif roll < 0.8:
                other = rng.choice(notes)
                target = ops.nav_note(doc.notes[other].board_id, other)
            else:
                target = ops.nav_external(
                    f"https://media.example.com/{self.serial}.mp4"
                )
            return emit(ops.add_nav_ref, rng.choice(notes), target)
        if action == "remove_nav_ref":
            linked = sorted(
                (n, rid) for n in notes for rid in doc.notes[n].nav_refs
            )
            if not linked:
                return fallback_create()
            note, rid = linked[rng.randrange(len(linked))]
            return emit(ops.remove_nav_ref, note, rid)
        if action == "post_chat":
            return emit(ops.post_chat, f"{self.replica.client} says {self.serial}")
        if action == "set_stage":
            current = STAGE_ORDER.index(
                InnovationStage(doc.values.get("stage", "preparation"))
            )
            allowed = list(range(current)) + (
                [current + 1] if current + 1 < len(STAGE_ORDER) else []
            )
            if not allowed:
                return fallback_create()
            return emit(ops.set_stage, STAGE_ORDER[rng.choice(allowed)].value)
        if action == "set_project_title":
            return emit(ops.set_project_title, f"title {self.serial}")
        return fallback_create()


_ACTIONS = [
    "create_note",
    "move_note",
    "edit_note_text",
    "set_note_color",
    "set_highlight",
    "resize_note",
    "delete_note",
    "create_connection",
    "delete_connection",
    "add_attachment",
    "remove_attachment",
    "add_nav_ref",
    "remove_nav_ref",
    "post_chat",
    "create_board",
    "rename_board",
    "set_perspective",
    "set_stage",
    "set_project_title",
]
_WEIGHTS = [22, 18, 8, 7, 5, 5, 5, 6, 2, 4, 1, 4, 1, 5, 2, 2, 1, 1, 1]
_NEEDS_NOTE = frozenset(
    {
        "move_note",
        "edit_note_text",
        "resize_note",
        "set_note_color",
        "set_highlight",
        "delete_note",
        "add_attachment",
        "remove_attachment",
        "add_nav_ref",
        "remove_nav_ref",
    }
)


def simulate(
    clients: int, ops_per_client: int, seed: int, delay_model: str = "uniform"
) -> ConvergenceReport:
    """Run one seeded schedule and report per-replica hashes vs the oracle."""
    if delay_model not in DELAY_MODELS:
        raise ValueError(f"unknown delay model {delay_model!r}")
    if clients < 2:
        raise ValueError("need at least 2 clients")

    rng = random.Random(seed)
    project_id = f"Sim{abs(seed) % 10**19:019d}"
    title = "simulation"
    host = ProjectHost(make_project(project_id, title=title))
    scheduler = _Scheduler()

    sims: dict[str, _SimClient] = {}
    to_client: dict[str, _Link] = {}
    to_server: dict[str, _Link] = {}
    all_ops: list[dict] = []
    counters = {"deliveries": 0}

    def deliver_to_client(client_id: str, message: dict) -> None:
        counters["deliveries"] += 1
        if message.get("t") == "op":
            sims[client_id].replica.integrate(message["op"])

    def deliver_to_server(client_id: str, message: dict) -> None:
        counters["deliveries"] += 1
        for target, out in host.handle_op(client_id, message):
            if target == "*":
                for cid in sims:
                    to_client[cid].send(out)
            elif target is None:
                to_client[client_id].send(out)

    for i in range(clients):
        client_id = f"c{i + 1:02d}"
        sims[client_id] = _SimClient(client_id, project_id, title)
        host.hello(client_id, 0, _LOCALES[i % len(_LOCALES)])
        to_client[client_id] = _Link(
            scheduler, rng, delay_model,
            lambda m, cid=client_id: deliver_to_client(cid, m),
        )
        to_server[client_id] = _Link(
            scheduler, rng, delay_model,
            lambda m, cid=client_id: deliver_to_server(cid, m),
        )

    def emit(client_id: str) -> None:
        op = sims[client_id].emit_random(rng)
        all_ops.append(op)
        to_server[client_id].send({"t": "op", "op": op})

    for client_id in sims:
        when = 0
        for _ in range(ops_per_client):
            when += rng.randint(1, 4)
            scheduler.at(when, emit, client_id)

    # Run to quiescence; adversarial buffers may need repeated flushing.
    while True:
        scheduler.drain()
        pending = [l for l in (*to_client.values(), *to_server.values()) if l.buffer]
        if not pending:
            break
        for link in pending:
            link.flush()

    replica_hashes = {cid: canonical_hash(sim.replica.doc) for cid, sim in sims.items()}
    replica_hashes["#server"] = canonical_hash(host.doc)
    oracle = canonical_hash(oracle_replay(all_ops, project_id, title=title))
    converged = all(h == oracle for h in replica_hashes.values())
    duplicates = sum(l.duplicates for l in (*to_client.values(), *to_server.values()))

    return ConvergenceReport(
        seed=seed,
        clients=clients,
        ops_per_client=ops_per_client,
        delay_model=delay_model,
        converged=converged,
        oracle_hash=oracle,
        replica_hashes=replica_hashes,
        ops_total=len(all_ops),
        deliveries=counters["deliveries"],
        duplicates=duplicates,
    )
