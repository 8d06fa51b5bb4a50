import pytest

from innoboard.templates import (
    LAYOUTS,
    InnovationStage,
    Perspective,
    STAGE_ORDER,
    TechniqueTag,
    TemplateKind,
    TransitionError,
    check_transition,
    default_note_size,
    instantiate,
    layout,
    recommended_templates,
)


def overlap_area(a, b):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    w = min(ax + aw, bx + bw) - max(ax, bx)
    h = min(ay + ah, by + bh) - max(ay, by)
    return max(w, 0.0) * max(h, 0.0)


def test_exactly_five_template_kinds():
    assert len(TemplateKind) == 5
    assert {k.value for k in TemplateKind} == {
        "free_wall",
        "design_thinking",
        "swot",
        "kanban",
        "scrum",
    }


@pytest.mark.parametrize("kind", list(TemplateKind))
def test_layout_partitions_unit_square(kind):
    regions = layout(kind)
    total = sum(r.rect[2] * r.rect[3] for r in regions)
    assert abs(total - 1.0) <= 1e-9
    for i, a in enumerate(regions):
        for b in regions[i + 1 :]:
            assert overlap_area(a.rect, b.rect) <= 1e-12


def test_swot_has_the_four_quadrants():
    regions = layout(TemplateKind.SWOT)
    assert [r.region_id for r in regions] == [
        "strengths",
        "weaknesses",
        "opportunities",
        "threats",
    ]
    for r in regions:
        assert r.rect[2] == 0.5 and r.rect[3] == 0.5


def test_free_wall_is_one_full_region():
    (region,) = layout(TemplateKind.FREE_WALL)
    assert region.rect == (0.0, 0.0, 1.0, 1.0)
    assert region.region_id == "wall"


def test_kanban_three_columns_full_width():
    regions = layout(TemplateKind.KANBAN)
    assert [r.region_id for r in regions] == ["todo", "doing", "done"]
    assert abs(sum(r.rect[2] for r in regions) - 1.0) <= 1e-9


def test_scrum_five_columns():
    regions = layout(TemplateKind.SCRUM)
    assert [r.region_id for r in regions] == [
        "backlog",
        "sprint",
        "in_progress",
        "review",
        "done",
    ]
    assert all(abs(r.rect[2] - 0.2) <= 1e-12 for r in regions)


def test_design_thinking_five_columns():
    assert [r.region_id for r in layout(TemplateKind.DESIGN_THINKING)] == [
        "empathize",
        "define",
        "ideate",
        "prototype",
        "test",
    ]


def test_region_labels_are_i18n_keys():
    for kind in TemplateKind:
        for region in layout(kind):
            assert region.label_key == f"tpl.{kind.value}.{region.region_id}"


def test_instantiate_swot():
    board = instantiate(TemplateKind.SWOT, "Eval", Perspective.OVERVIEW)
    assert board.kind == "swot"
    assert board.values["title"] == "Eval"
    assert len(layout(board.kind)) == 4


def test_instantiate_free_wall_with_technique():
    board = instantiate("free_wall", "Brainstorm", technique="method_635")
    assert board.technique == TechniqueTag.METHOD_635.value
    assert len(layout(board.kind)) == 1


def test_detail_perspective_halves_default_note_size():
    assert default_note_size(Perspective.OVERVIEW) == (0.12, 0.08)
    assert default_note_size(Perspective.DETAIL) == (0.06, 0.04)


def test_recommendations_match_process_stages():
    assert recommended_templates("idea_generation") == [
        TemplateKind.FREE_WALL,
        TemplateKind.DESIGN_THINKING,
    ]
    assert recommended_templates("idea_evaluation") == [TemplateKind.SWOT]
    assert recommended_templates("planning") == [TemplateKind.KANBAN, TemplateKind.SCRUM]
    for stage in ("preparation", "prototyping", "marketing_reflection"):
        assert recommended_templates(stage) == [TemplateKind.FREE_WALL]


def test_recommendations_total_over_stage_enum():
    for stage in InnovationStage:
        kinds = recommended_templates(stage)
        assert kinds and all(isinstance(k, TemplateKind) for k in kinds)


def test_exactly_six_ordered_stages():
    assert [s.value for s in STAGE_ORDER] == [
        "preparation",
        "idea_generation",
        "idea_evaluation",
        "planning",
        "prototyping",
        "marketing_reflection",
    ]


def test_single_forward_step_allowed():
    check_transition("preparation", "idea_generation")


def test_backward_jump_allowed():
    check_transition("prototyping", "idea_generation")


def test_forward_jump_rejected():
    with pytest.raises(TransitionError) as err:
        check_transition("preparation", "planning")
    assert err.value.current is InnovationStage.PREPARATION
    assert err.value.target is InnovationStage.PLANNING


def test_every_stage_reachable_from_preparation():
    # Oracle: breadth-first search over the allowed transition relation.
    def allowed(i, j):
        return j - i <= 1

    reached = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(len(STAGE_ORDER)):
            if j not in reached and allowed(i, j):
                reached.add(j)
                frontier.append(j)
    assert reached == set(range(6))


def test_final_stage_needs_exactly_five_forward_steps():
    path = list(STAGE_ORDER)
    for current, target in zip(path, path[1:]):
        check_transition(current, target)
    assert len(path) - 1 == 5
