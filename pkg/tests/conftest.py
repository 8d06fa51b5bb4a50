import pytest

from innoboard import ops
from innoboard.model import make_project
from innoboard.replication import ReplicaState

PROJECT_ID = "TestProject0000000000A"


def new_replica(client: str = "alice", project_id: str = PROJECT_ID) -> ReplicaState:
    return ReplicaState(client, make_project(project_id, title="test"))


def new_board(replica: ReplicaState, kind: str = "free_wall", title: str = "Board") -> str:
    op = replica.emit(ops.create_board, kind, title)
    return ops.board_id_for(ops.op_stamp(op))


def new_note(
    replica: ReplicaState,
    board_id: str,
    position: tuple = (0.1, 0.1),
    text: str = "note",
    size: tuple | None = None,
) -> str:
    op = replica.emit(ops.create_note, board_id, position, text, size)
    return ops.note_id_for(ops.op_stamp(op))


class Recorder:
    """Replica wrapper that keeps the emission history for re-driving."""

    def __init__(self, client: str = "alice", project_id: str = PROJECT_ID, title: str = "test"):
        self.replica = ReplicaState(client, make_project(project_id, title=title))
        self.history: list[dict] = []

    def emit(self, build, *args, **kwargs) -> dict:
        op = self.replica.emit(build, *args, **kwargs)
        self.history.append(op)
        return op

    @property
    def doc(self):
        return self.replica.doc

    @property
    def client(self) -> str:
        return self.replica.client


@pytest.fixture
def replica() -> ReplicaState:
    return new_replica()
