"""Replica state: clock, dedup set and operation integration.

Integration is idempotent (delivering an op twice changes nothing) and
order-independent, so replicas converge under arbitrary reordering and
duplication. The reference point is `oracle_replay`: applying the same op
set once, sorted by stamp, must yield the same document as any delivery
schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Project, apply_in_place, make_project
from .ops import op_stamp
from .stamps import LamportClock, Stamp


@dataclass
class ReplicaState:
    """One logical owner's view of a project.

    `applied` holds exactly the op ids reflected in `doc`; the clock stays
    at or above every lamport seen, so locally minted stamps always
    supersede what the replica has observed.
    """

    client: str
    doc: Project
    applied: set = field(default_factory=set)
    clock: LamportClock = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.clock is None:
            self.clock = LamportClock(self.client)

    def tick(self, observed: Stamp | None = None) -> Stamp:
        return self.clock.tick(observed)

    def integrate(self, op: dict) -> bool:
        """Fold one op into the document. Returns False for re-deliveries."""
        op_id = op_stamp(op).key()
        if op_id in self.applied:
            return False
        apply_in_place(self.doc, op)
        self.applied.add(op_id)
        self.clock.observe(op_stamp(op))
        return True

    def emit(self, build, *args, **kwargs) -> dict:
        """Mint a stamp, build an op with it, apply it locally, return it."""
        op = build(self.tick(), *args, **kwargs)
        self.integrate(op)
        return op


def oracle_replay(
    ops: list[dict],
    project_id: str,
    title: str = "",
    default_locale: str = "en",
) -> Project:
    """Independent convergence oracle: single replay in stamp total order.

    Any replica that integrated the same op set, in whatever order and with
    whatever duplication, must hold a canonically identical document.
    """
    doc = make_project(project_id, title=title, default_locale=default_locale)
    seen: set = set()
    for op in sorted(ops, key=op_stamp):
        op_id = op_stamp(op).key()
        if op_id in seen:
            continue
        seen.add(op_id)
        apply_in_place(doc, op)
    return doc
