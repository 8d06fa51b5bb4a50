"""Real-time collaborative innovation board.

Replicated sticky-note documents (boards, notes, connections, chat, process
stages) that any number of clients edit concurrently over a websocket sync
protocol, with last-writer-wins per-field merging and guaranteed replica
convergence.
"""

from .model import Project, apply, clamp_position, make_project, region_of, validate
from .replication import ReplicaState, oracle_replay
from .stamps import LamportClock, Stamp, merge_field

__version__ = "0.1.0"

__all__ = [
    "LamportClock",
    "Project",
    "ReplicaState",
    "Stamp",
    "apply",
    "clamp_position",
    "make_project",
    "merge_field",
    "oracle_replay",
    "region_of",
    "validate",
    "__version__",
]
