"""Version stamps: the (lamport, client) pairs that totally order every edit.

A stamp is minted once per operation by the emitting client's clock and
travels with the operation forever. Conflict resolution everywhere else in
the package reduces to comparing stamps under their total order.
"""

from __future__ import annotations

from typing import NamedTuple

# Clocks are 63-bit so stamps survive any JSON round trip untouched.
MAX_LAMPORT = 2**63 - 1


class ClockOverflowError(RuntimeError):
    """Lamport counter exhausted; the replica must resync from a snapshot."""


class Stamp(NamedTuple):
    """Totally ordered version stamp.

    Tuple comparison gives the order: lamport first, ties broken by the
    lexicographically larger client id.
    """

    lamport: int
    client: str

    def key(self) -> str:
        """Stable string form, used to derive entity ids."""
        return f"{self.lamport}.{self.client}"

    def as_json(self) -> dict:
        return {"client": self.client, "lamport": self.lamport}

    @classmethod
    def from_json(cls, data: dict) -> "Stamp":
        return cls(int(data["lamport"]), str(data["client"]))


#: Stamp that loses to every real stamp (clients are non-empty strings).
ZERO_STAMP = Stamp(0, "")


def merge_field(current: Stamp, incoming: Stamp) -> bool:
    """Last-writer-wins decision for one field: True means replace.

    Replaces only when the incoming stamp is strictly greater, so replaying
    the current winner is a no-op and the decision commutes: for any two
    stamps the same winner is picked regardless of arrival order.
    """
    return incoming > current


class LamportClock:
    """Per-replica logical clock minting strictly increasing stamps."""

    __slots__ = ("client", "counter")

    def __init__(self, client: str, counter: int = 0) -> None:
        self.client = client
        self.counter = counter

    def observe(self, stamp: Stamp) -> None:
        """Advance past a remote stamp so the next local stamp supersedes it."""
        if stamp.lamport > self.counter:
            self.counter = stamp.lamport

    def tick(self, observed: Stamp | None = None) -> Stamp:
        """Mint the next stamp: counter = max(counter, observed) + 1."""
        if observed is not None:
            self.observe(observed)
        if self.counter >= MAX_LAMPORT:
            raise ClockOverflowError(
                f"lamport counter for {self.client!r} reached {MAX_LAMPORT}"
            )
        self.counter += 1
        return Stamp(self.counter, self.client)
