"""Board templates and the innovation-process stage machine.

Five fixed board templates, each a list of labeled regions that partition
the unit square, plus the six-stage process model with its per-stage
template recommendations and transition rule (one step forward, any number
of steps back).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TemplateKind(str, Enum):
    FREE_WALL = "free_wall"
    DESIGN_THINKING = "design_thinking"
    SWOT = "swot"
    KANBAN = "kanban"
    SCRUM = "scrum"


class Perspective(str, Enum):
    OVERVIEW = "overview"
    DETAIL = "detail"


class InnovationStage(str, Enum):
    PREPARATION = "preparation"
    IDEA_GENERATION = "idea_generation"
    IDEA_EVALUATION = "idea_evaluation"
    PLANNING = "planning"
    PROTOTYPING = "prototyping"
    MARKETING_REFLECTION = "marketing_reflection"


#: Stage order used by the transition rule.
STAGE_ORDER: tuple[InnovationStage, ...] = tuple(InnovationStage)


class TechniqueTag(str, Enum):
    """Idea-generation technique labels; metadata only, no executable rules."""

    DESIGN_THINKING = "design_thinking"
    METHOD_635 = "method_635"
    ABC_METHOD = "abc_method"
    STOP_AND_GO_BRAINSTORMING = "stop_and_go_brainstorming"


@dataclass(frozen=True, slots=True)
class Region:
    """Named sub-rectangle of a board; rect is (x, y, w, h) normalized."""

    region_id: str
    label_key: str
    rect: tuple[float, float, float, float]


def _columns(kind: str, names: list[str]) -> tuple[Region, ...]:
    width = 1.0 / len(names)
    return tuple(
        Region(name, f"tpl.{kind}.{name}", (i * width, 0.0, width, 1.0))
        for i, name in enumerate(names)
    )


LAYOUTS: dict[TemplateKind, tuple[Region, ...]] = {
    TemplateKind.FREE_WALL: (
        Region("wall", "tpl.free_wall.wall", (0.0, 0.0, 1.0, 1.0)),
    ),
    TemplateKind.SWOT: (
        Region("strengths", "tpl.swot.strengths", (0.0, 0.0, 0.5, 0.5)),
        Region("weaknesses", "tpl.swot.weaknesses", (0.5, 0.0, 0.5, 0.5)),
        Region("opportunities", "tpl.swot.opportunities", (0.0, 0.5, 0.5, 0.5)),
        Region("threats", "tpl.swot.threats", (0.5, 0.5, 0.5, 0.5)),
    ),
    TemplateKind.KANBAN: _columns("kanban", ["todo", "doing", "done"]),
    TemplateKind.SCRUM: _columns(
        "scrum", ["backlog", "sprint", "in_progress", "review", "done"]
    ),
    TemplateKind.DESIGN_THINKING: _columns(
        "design_thinking", ["empathize", "define", "ideate", "prototype", "test"]
    ),
}

#: Default note footprint, normalized; Detail boards start notes at half this.
DEFAULT_NOTE_SIZE: tuple[float, float] = (0.12, 0.08)


def layout(kind: TemplateKind | str) -> tuple[Region, ...]:
    """Region table for a template kind; regions partition the unit square."""
    return LAYOUTS[TemplateKind(kind)]


def default_note_size(perspective: Perspective | str) -> tuple[float, float]:
    """Creation-time note size: Detail boards halve the default footprint."""
    w, h = DEFAULT_NOTE_SIZE
    if Perspective(perspective) is Perspective.DETAIL:
        return (w / 2, h / 2)
    return (w, h)


def instantiate(
    kind: TemplateKind | str,
    title: str,
    perspective: Perspective | str = Perspective.OVERVIEW,
    technique: TechniqueTag | str | None = None,
):
    """Build a fresh standalone board for a template: regions set, no notes."""
    from .model import BoardRec  # deferred: model depends on this module

    kind = TemplateKind(kind)
    perspective = Perspective(perspective)
    if technique is not None:
        technique = TechniqueTag(technique).value
    from .stamps import ZERO_STAMP

    board = BoardRec(board_id=f"b0.{title}", kind=kind.value, created=ZERO_STAMP)
    board.values["title"] = title
    board.stamps["title"] = ZERO_STAMP
    board.values["perspective"] = perspective.value
    board.stamps["perspective"] = ZERO_STAMP
    board.technique = technique
    return board


def recommended_templates(stage: InnovationStage | str) -> list[TemplateKind]:
    """Templates suggested for a process stage."""
    stage = InnovationStage(stage)
    if stage is InnovationStage.IDEA_GENERATION:
        return [TemplateKind.FREE_WALL, TemplateKind.DESIGN_THINKING]
    if stage is InnovationStage.IDEA_EVALUATION:
        return [TemplateKind.SWOT]
    if stage is InnovationStage.PLANNING:
        return [TemplateKind.KANBAN, TemplateKind.SCRUM]
    return [TemplateKind.FREE_WALL]


class TransitionError(ValueError):
    """Forward jump over more than one stage."""

    def __init__(self, current: InnovationStage, target: InnovationStage) -> None:
        super().__init__(
            f"cannot jump from {current.value} to {target.value}: "
            "stages advance one step at a time (going back is always allowed)"
        )
        self.current = current
        self.target = target


def check_transition(
    current: InnovationStage | str, target: InnovationStage | str
) -> None:
    """Raise TransitionError unless current -> target is an allowed move.

    Allowed: one step forward, staying put, or any number of steps backward.
    The process is iterative, so backtracking is never restricted.
    """
    current = InnovationStage(current)
    target = InnovationStage(target)
    delta = STAGE_ORDER.index(target) - STAGE_ORDER.index(current)
    if delta > 1:
        raise TransitionError(current, target)
