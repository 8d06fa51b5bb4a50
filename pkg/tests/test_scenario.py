import json
from pathlib import Path

import pytest

from innoboard.canonical import canonical_bytes
from innoboard.scenario import (
    ScenarioError,
    compare_with_golden,
    run_script,
    run_script_file,
)

SCRIPT = Path(__file__).parent.parent / "scenario" / "park_scenario.json"
GOLDEN = SCRIPT.parent / "golden"


def load_script() -> dict:
    return json.loads(SCRIPT.read_text(encoding="utf-8"))


def test_shipped_script_matches_goldens():
    result = run_script_file(SCRIPT)
    assert compare_with_golden(result, GOLDEN) == []


def test_replay_twice_is_identical():
    one = run_script_file(SCRIPT)
    two = run_script_file(SCRIPT)
    assert one.export_bytes == two.export_bytes
    assert one.jump_points_jsonable == two.jump_points_jsonable
    assert one.backlinks_jsonable == two.backlinks_jsonable


def test_all_clients_converge_with_server():
    result = run_script_file(SCRIPT)
    server = canonical_bytes(result.project)
    for client, doc in result.client_docs.items():
        assert canonical_bytes(doc) == server, f"{client} diverged"


def test_extra_note_causes_mismatch():
    script = load_script()
    script["steps"].append(
        {
            "client": "pm.de",
            "action": "create_note",
            "board": "plan",
            "position": [0.85, 0.8],
            "text": "sneaky extra note",
        }
    )
    result = run_script(script)
    mismatches = compare_with_golden(result, GOLDEN)
    assert any(entry.startswith("export.json") for entry in mismatches)
    assert any("sneaky extra note" in entry for entry in mismatches)


def test_unknown_alias_is_a_script_error():
    script = load_script()
    script["steps"].append(
        {"client": "pm.de", "action": "delete_note", "note": "never_created"}
    )
    with pytest.raises(ScenarioError):
        run_script(script)


def test_invalid_stage_jump_is_a_script_error():
    script = load_script()
    # Script ends in planning; jumping forward two stages must refuse.
    script["steps"].append(
        {"client": "pm.de", "action": "advance_stage", "stage": "marketing_reflection"}
    )
    with pytest.raises(ScenarioError):
        run_script(script)


def test_update_golden_round_trip(tmp_path):
    result = run_script_file(SCRIPT)
    assert compare_with_golden(result, tmp_path, update=True) == []
    assert compare_with_golden(result, tmp_path) == []
    for name in ("export.json", "jump_points.json", "backlinks.json"):
        assert (tmp_path / name).read_bytes() == (GOLDEN / name).read_bytes()
