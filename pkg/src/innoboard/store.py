"""Durable project storage: append-only op log plus canonical snapshots.

Layout per project, under the data directory:

    <data_dir>/<project_id>/snapshot.json   canonical doc + snapshot seq
    <data_dir>/<project_id>/ops.log         one {"seq": n, "op": {...}} per line

Appends happen before any broadcast (write-ahead), so a crash never
acknowledges an op that is lost. Snapshots are written to a temp file and
renamed into place; a failure anywhere mid-compaction leaves the previous
snapshot/log pair fully loadable.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .canonical import canonical_bytes, emit, project_from_jsonable, project_to_jsonable
from .model import Project, apply_in_place, collect_garbage

DEFAULT_COMPACT_THRESHOLD = 1000


class StorageError(RuntimeError):
    """Disk-level failure; the caller must reject the triggering op."""


class ProjectStore:
    def __init__(self, root: Path | str, fsync: bool = True) -> None:
        self.root = Path(root)
        self.fsync = fsync
        self._last_seq: dict[str, int] = {}

    # -- paths ------------------------------------------------------------

    def project_dir(self, project_id: str) -> Path:
        return self.root / project_id

    def _snapshot_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "snapshot.json"

    def _log_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "ops.log"

    def exists(self, project_id: str) -> bool:
        return self._snapshot_path(project_id).is_file()

    def list_projects(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(
            p.name for p in self.root.iterdir() if (p / "snapshot.json").is_file()
        )

    # -- snapshot ---------------------------------------------------------

    def write_snapshot(self, project_id: str, project: Project, seq: int) -> None:
        """Atomically replace the snapshot: write temp, fsync, rename."""
        directory = self.project_dir(project_id)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            payload = emit({"doc": project_to_jsonable(project), "seq": seq})
            tmp = directory / "snapshot.json.tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(payload)
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
            os.replace(tmp, self._snapshot_path(project_id))
        except OSError as exc:
            raise StorageError(f"snapshot write failed: {exc}") from exc

    def read_snapshot(self, project_id: str) -> tuple[Project, int]:
        path = self._snapshot_path(project_id)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise StorageError(f"snapshot read failed: {exc}") from exc
        return project_from_jsonable(data["doc"]), int(data["seq"])

    # -- log --------------------------------------------------------------

    def append(self, project_id: str, seq: int, op: dict) -> None:
        """Durably append one op; seq must extend the log densely."""
        expected = self.last_seq(project_id) + 1
        if seq != expected:
            raise StorageError(f"append out of order: got seq {seq}, want {expected}")
        line = json.dumps({"op": op, "seq": seq}, sort_keys=True) + "\n"
        try:
            with open(self._log_path(project_id), "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"log append failed: {exc}") from exc
        self._last_seq[project_id] = seq

    def read_log(self, project_id: str) -> list[tuple[int, dict]]:
        """Log entries in file order. A torn final line (crash during a
        write) is dropped; corruption anywhere else raises."""
        path = self._log_path(project_id)
        if not path.is_file():
            return []
        entries: list[tuple[int, dict]] = []
        raw = path.read_bytes().decode("utf-8", errors="replace")
        lines = raw.split("\n")
        for i, line in enumerate(lines):
            if line == "":
                continue
            try:
                record = json.loads(line)
                entries.append((int(record["seq"]), record["op"]))
            except (ValueError, KeyError, TypeError) as exc:
                if i == len(lines) - 1:
                    break  # torn tail from a mid-write crash
                raise StorageError(f"corrupt log line {i + 1}: {exc}") from exc
        return entries

    def last_seq(self, project_id: str) -> int:
        cached = self._last_seq.get(project_id)
        if cached is not None:
            return cached
        _, snapshot_seq = self.read_snapshot(project_id)
        entries = self.read_log(project_id)
        last = max([snapshot_seq] + [seq for seq, _ in entries])
        self._last_seq[project_id] = last
        return last

    # -- lifecycle --------------------------------------------------------

    def create(self, project_id: str, project: Project) -> None:
        if self.exists(project_id):
            raise StorageError(f"project {project_id} already exists")
        self.write_snapshot(project_id, project, 0)
        self._last_seq[project_id] = 0

    def load(self, project_id: str) -> tuple[Project, int, list[tuple[int, dict]]]:
        """Recover: snapshot plus replay of every logged op past it.

        Returns (document at head, snapshot seq, retained log tail) so the
        caller can keep serving replays for reconnecting clients.
        """
        project, snapshot_seq = self.read_snapshot(project_id)
        tail = [(seq, op) for seq, op in self.read_log(project_id) if seq > snapshot_seq]
        expected = snapshot_seq
        for seq, op in tail:
            if seq != expected + 1:
                raise StorageError(f"log gap: jump from seq {expected} to {seq}")
            apply_in_place(project, op)
            expected = seq
        self._last_seq[project_id] = expected
        return project, snapshot_seq, tail

    def compact(self, project_id: str, project: Project, head_seq: int) -> None:
        """Fold the log into a fresh snapshot and truncate it.

        Mutates the live document: tombstones older than the snapshot are
        dropped from both so that load(snapshot)+replay(log) stays exact.
        Safe to re-run; failure before the rename leaves the old pair valid.
        """
        collect_garbage(project)
        self.write_snapshot(project_id, project, head_seq)
        try:
            with open(self._log_path(project_id), "w", encoding="utf-8") as fh:
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"log truncate failed: {exc}") from exc
        self._last_seq[project_id] = head_seq


# --------------------------------------------------------------------------
# portable export / import


def export_project(project: Project) -> bytes:
    """Self-contained portable document: observable state, no tombstones."""
    copy = project.clone()
    collect_garbage(copy)
    return canonical_bytes(copy)


def import_project(raw: bytes) -> Project:
    from .canonical import project_from_bytes

    return project_from_bytes(raw)
