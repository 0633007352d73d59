"""CLI behavior: exit codes, file outputs, and parity with module calls."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from helpers import record_two_step_log, sales_mini_doc

from tourforge.canonical import canonical_json
from tourforge.cli import main
from tourforge.events import serialize_interaction_log
from tourforge.playback import export_playback_trace
from tourforge.tours import parse_tour

DATA = Path(__file__).parent / "data"
SPEC = str(DATA / "sales-mini.json")


@pytest.fixture()
def trace_file(sales_mini, tmp_path) -> str:
    log = record_two_step_log(sales_mini)
    path = tmp_path / "session.log.json"
    path.write_text(serialize_interaction_log(log), encoding="utf-8")
    return str(path)


def create_tour_file(tmp_path, trace_file, *extra: str) -> str:
    tour_path = str(tmp_path / "tour.json")
    code = main(["tour", "create", SPEC, "--trace", trace_file,
                 "--goal", "interaction", "--id", "cli-tour",
                 "-o", tour_path, *extra])
    assert code == 0
    return tour_path


def test_validate_ok(capsys):
    assert main(["validate", SPEC]) == 0
    out = capsys.readouterr().out
    assert "sales-mini" in out and "2 charts" in out


def test_validate_reports_first_error_with_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"id": }', encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "line 1" in err

    invalid = tmp_path / "invalid.json"
    doc = sales_mini_doc()
    doc["actions"][0]["targetZones"] = ["Z9"]
    invalid.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["validate", str(invalid)]) == 1
    assert "Z9" in capsys.readouterr().err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["tour", "create", SPEC])  # missing required flags
    assert exc.value.code == 2


def test_create_template_play_chain(tmp_path, trace_file, capsys):
    tour_path = create_tour_file(tmp_path, trace_file)
    assert main(["tour", "generate", tour_path, SPEC, "--template"]) == 0
    assert main(["tour", "play", tour_path, SPEC, "--step", "0"]) == 0
    out = capsys.readouterr().out
    assert "filters Product Chart" in out
    assert "is now 30." in out  # {sum:Product Chart.y} rendered under region=East


def test_play_trace_out_matches_module_call(tmp_path, trace_file, sales_mini):
    tour_path = create_tour_file(tmp_path, trace_file)
    main(["tour", "generate", tour_path, SPEC, "--template"])
    trace_out = tmp_path / "trace.json"
    assert main(["tour", "play", tour_path, SPEC, "--trace-out", str(trace_out)]) == 0

    tour = parse_tour(Path(tour_path).read_text(encoding="utf-8"))
    expected = canonical_json(export_playback_trace(sales_mini, tour))
    assert trace_out.read_text(encoding="utf-8") == expected


def test_generate_mock_good_replies(tmp_path, trace_file):
    tour_path = create_tour_file(tmp_path, trace_file)
    assert main(["tour", "generate", tour_path, SPEC,
                 "--mock", str(DATA / "mock-replies-good")]) == 0
    tour = parse_tour(Path(tour_path).read_text(encoding="utf-8"))
    assert tour.steps[0].title == "Pick the East region"
    assert tour.metadata.title == "Mock Tour"
    assert all(s.content_origin is not None for s in tour.steps)


def test_generate_mock_bad_replies_exits_1(tmp_path, trace_file, capsys):
    tour_path = create_tour_file(tmp_path, trace_file)
    before = Path(tour_path).read_text(encoding="utf-8")
    assert main(["tour", "generate", tour_path, SPEC,
                 "--mock", str(DATA / "mock-replies-bad")]) == 1
    assert "3 attempts" in capsys.readouterr().err
    assert Path(tour_path).read_text(encoding="utf-8") == before


def test_generate_remote_without_env_exits_1(tmp_path, trace_file, capsys,
                                             monkeypatch):
    for var in ("TOURFORGE_LLM_URL", "TOURFORGE_LLM_MODEL", "TOURFORGE_MODE"):
        monkeypatch.delenv(var, raising=False)
    tour_path = create_tour_file(tmp_path, trace_file)
    assert main(["tour", "generate", tour_path, SPEC]) == 1
    assert "TOURFORGE_LLM_URL" in capsys.readouterr().err


def test_edit_step_content_and_offset(tmp_path, trace_file):
    tour_path = create_tour_file(tmp_path, trace_file)
    assert main(["tour", "edit", tour_path, "--step", "0",
                 "--title", "Hand title", "--description", "Hand text"]) == 0
    assert main(["tour", "edit", tour_path, "--step", "0",
                 "--offset", "30", "40"]) == 0
    assert main(["tour", "edit", tour_path, "--insert-standalone", "1",
                 "--instruction", "pause here"]) == 0
    tour = parse_tour(Path(tour_path).read_text(encoding="utf-8"))
    assert tour.steps[0].title == "Hand title"
    assert tour.steps[0].content_origin.value == "manual"
    assert tour.steps[0].overlay_offset == (30.0, 40.0)
    assert tour.steps[1].kind.value == "standalone"
    assert len(tour.steps) == 3


def test_edit_goal_override_then_template_regenerates_as_semantics(
        tmp_path, trace_file, capsys):
    tour_path = create_tour_file(tmp_path, trace_file)
    main(["tour", "generate", tour_path, SPEC, "--template"])
    assert main(["tour", "edit", tour_path, "--step", "0", "--goal", "semantics"]) == 0
    assert main(["tour", "generate", tour_path, SPEC, "--template", "--step", "0"]) == 0
    tour = parse_tour(Path(tour_path).read_text(encoding="utf-8"))
    assert tour.steps[0].description.startswith("Region Chart is a bar chart")
    # step 1 kept its interaction-guide template text
    assert tour.steps[1].description.startswith("Choosing West")


def test_tour_create_rejects_foreign_trace(tmp_path, trace_file, capsys):
    other = tmp_path / "other.json"
    doc = sales_mini_doc()
    doc["id"] = "other-dash"
    other.write_text(json.dumps(doc), encoding="utf-8")
    code = main(["tour", "create", str(other), "--trace", trace_file,
                 "--goal", "facts", "-o", str(tmp_path / "t.json")])
    assert code == 1
    assert "sales-mini" in capsys.readouterr().err
