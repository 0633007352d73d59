"""Prompt fidelity, reply parsing, and the generation pipeline."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from helpers import make_two_step_tour, step_reply, tour_reply, write_replies

from tourforge.dashboard import dashboard_from_dict, summarize_metadata
from tourforge.errors import (
    BackendTransportError,
    GenerationFailedError,
    ResponseFormatError,
    UnknownIdError,
)
from tourforge.generation import (
    MockChat,
    extract_first_object,
    generate_tour,
    parse_generation_response,
    parse_step_response,
    regenerate_step,
)
from tourforge.prompts import (
    build_context_prompt,
    build_step_prompt,
    build_tour_prompt,
    goal_definition,
)
from tourforge.tours import (
    CommunicationGoal,
    ContentOrigin,
    TourMetadata,
    create_tour,
    serialize_tour,
    set_step_goal,
    step_to_dict,
)

GOLDEN = Path(__file__).parent / "data" / "golden"

SEMANTICS_GOAL = (
    "Focus on explaining chart encoding and markers and the purpose of "
    "different filters, dropdowns, and other UI widgets in this dashboard tour."
)
INTERACTION_GOAL = (
    "Focus on explaining interaction and the effects of interactions on "
    "other coordinated views for this dashboard tour."
)
DATA_FACTS_GOAL = (
    "Focus on highlighting notable insights, trends, comparisons, and "
    "outliers in the data for this dashboard tour."
)


class SpyBackend:
    """Scripted backend recording every (system, user) prompt it is sent."""

    def __init__(self, replies: list[str]):
        self.replies = list(replies)
        self.prompts: list[tuple[str, str]] = []

    @property
    def calls(self) -> int:
        return len(self.prompts)

    def complete(self, system: str, user: str) -> str:
        self.prompts.append((system, user))
        return self.replies[min(len(self.prompts) - 1, len(self.replies) - 1)]


class FailingBackend:
    def complete(self, system: str, user: str) -> str:
        raise BackendTransportError("wire cut")


# -- goal strings ---------------------------------------------------------------

def test_goal_definitions_verbatim():
    assert goal_definition(CommunicationGoal.DASHBOARD_SEMANTICS) == SEMANTICS_GOAL
    assert goal_definition(CommunicationGoal.INTERACTION_GUIDE) == INTERACTION_GOAL
    assert goal_definition(CommunicationGoal.DATA_FACTS) == DATA_FACTS_GOAL


# -- prompt builders --------------------------------------------------------------

def test_context_prompt_matches_golden(sales_mini):
    bundle = build_context_prompt(summarize_metadata(sales_mini))
    assert bundle.role == "system"
    assert bundle.content == (GOLDEN / "context_prompt.txt").read_text(encoding="utf-8")


def test_context_prompt_deterministic(sales_mini):
    a = build_context_prompt(summarize_metadata(sales_mini))
    b = build_context_prompt(summarize_metadata(sales_mini))
    assert a == b


def test_context_prompt_empty_dashboard():
    d = dashboard_from_dict({
        "id": "empty", "title": "Empty", "size": {"width": 100, "height": 100},
        "datasets": [], "zones": [], "actions": [],
    })
    content = build_context_prompt(summarize_metadata(d)).content
    assert '"charts": []' in content and '"widgets": []' in content


def test_tour_prompt_matches_golden(sales_mini):
    tour = make_two_step_tour(sales_mini)
    bundle = build_tour_prompt(tour, sales_mini)
    assert bundle.role == "user"
    assert bundle.content == (GOLDEN / "tour_prompt.txt").read_text(encoding="utf-8")


def test_tour_prompt_contains_verbatim_anchors(sales_mini):
    content = build_tour_prompt(make_two_step_tour(sales_mini), sales_mini).content
    assert "outlining the structure of a dashboard tour" in content
    assert "Craft a story out of the steps" in content
    assert INTERACTION_GOAL in content
    assert "'coordinatedViewChange'" in content


def test_tour_prompt_instruction_block(sales_mini):
    tour = make_two_step_tour(
        sales_mini, instruction="Write the tour in third-person point of view."
    )
    content = build_tour_prompt(tour, sales_mini).content
    assert "Write the tour in third-person point of view." in content


def test_tour_prompt_empty_tour(sales_mini):
    from tourforge.events import start_recording, stop_recording

    empty = create_tour(stop_recording(start_recording(sales_mini)),
                        TourMetadata(goal=CommunicationGoal.DATA_FACTS))
    content = build_tour_prompt(empty, sales_mini).content
    assert '{"steps": []}' in content


def test_step_prompt_targets_one_step(sales_mini):
    tour = make_two_step_tour(sales_mini)
    bundle = build_step_prompt(tour, sales_mini, 1,
                               CommunicationGoal.DASHBOARD_SEMANTICS,
                               "explain the jitter")
    assert "Rewrite only step 1" in bundle.content
    assert SEMANTICS_GOAL in bundle.content
    assert "explain the jitter" in bundle.content
    with pytest.raises(UnknownIdError):
        build_step_prompt(tour, sales_mini, 9, CommunicationGoal.DATA_FACTS)


# -- reply parsing -----------------------------------------------------------------

def test_parse_wellformed_reply():
    content = parse_generation_response(tour_reply(2), expected_steps=2)
    assert content.tour_title == "Generated Tour"
    assert len(content.per_step) == 2


def test_parse_count_mismatch_reports_both():
    with pytest.raises(ResponseFormatError) as exc:
        parse_generation_response(tour_reply(1), expected_steps=2)
    assert exc.value.details == {"expected": 2, "got": 1}


def test_parse_tolerates_fences_and_prose():
    raw = (
        "Sure thing! Here is the tour you asked for:\n"
        "```json\n" + tour_reply(2) + "\n```\n"
        "Let me know if you need anything else."
    )
    content = parse_generation_response(raw, expected_steps=2)
    assert len(content.per_step) == 2


def test_parse_single_quoted_object():
    raw = "{'title': 'T', 'steps': [{'title': 'a', 'description': 'b'}]}"
    content = parse_generation_response(raw, expected_steps=1)
    assert content.per_step == (("a", "b"),)


def test_parse_steps_keyed_by_index():
    raw = json.dumps({"title": "T", "steps": {
        "0": {"title": "a", "description": "x"},
        "1": {"title": "b", "description": "y"},
    }})
    content = parse_generation_response(raw, expected_steps=2)
    assert content.per_step == (("a", "x"), ("b", "y"))


def test_parse_missing_description_errors():
    raw = json.dumps({"title": "T", "steps": [{"title": "a"}]})
    with pytest.raises(ResponseFormatError):
        parse_generation_response(raw, expected_steps=1)


def test_parse_no_object_errors():
    with pytest.raises(ResponseFormatError):
        extract_first_object("no json anywhere")


def test_parse_step_reply():
    assert parse_step_response(step_reply("T", "D")) == ("T", "D")
    with pytest.raises(ResponseFormatError):
        parse_step_response(json.dumps({"steps": []}))


# -- generation pipeline ------------------------------------------------------------

def test_generate_tour_fills_all_steps(sales_mini):
    tour = make_two_step_tour(sales_mini)
    backend = MockChat([tour_reply(2, tour_title="Mock Title")])
    out = generate_tour(tour, sales_mini, backend)
    assert backend.calls == 1
    assert all(s.title and s.description for s in out.steps)
    assert all(s.content_origin == ContentOrigin.GENERATED for s in out.steps)
    assert out.metadata.title == "Mock Title"  # author left the title absent
    assert out.revision == tour.revision + 1


def test_generate_tour_never_overwrites_author_title(sales_mini):
    tour = make_two_step_tour(sales_mini, title="My Tour")
    out = generate_tour(tour, sales_mini, MockChat([tour_reply(2, "Else")]))
    assert out.metadata.title == "My Tour"


def test_generate_tour_exhausts_after_three_attempts(sales_mini):
    tour = make_two_step_tour(sales_mini)
    backend = MockChat(["not json at all"])
    with pytest.raises(GenerationFailedError):
        generate_tour(tour, sales_mini, backend)
    assert backend.calls == 3


def test_generate_retry_appends_correction(sales_mini):
    tour = make_two_step_tour(sales_mini)
    backend = SpyBackend(["garbage", tour_reply(2)])
    out = generate_tour(tour, sales_mini, backend)
    assert backend.calls == 2
    first_user = backend.prompts[0][1]
    second_user = backend.prompts[1][1]
    assert second_user.startswith(first_user)
    assert "exactly 2 objects" in second_user
    assert all(s.title for s in out.steps)


def test_generate_transport_error_propagates(sales_mini):
    tour = make_two_step_tour(sales_mini)
    with pytest.raises(BackendTransportError):
        generate_tour(tour, sales_mini, FailingBackend())
    # original value untouched (tours are immutable; nothing was half-written)
    assert all(s.title == "" for s in tour.steps)


def test_regenerate_step_locality(sales_mini):
    tour = generate_tour(make_two_step_tour(sales_mini), sales_mini,
                         MockChat([tour_reply(2)]))
    out = regenerate_step(tour, sales_mini, "s2", MockChat([step_reply("New", "Text")]))
    assert step_to_dict(out.steps[0]) == step_to_dict(tour.steps[0])
    assert out.steps[1].title == "New"
    assert out.steps[1].description == "Text"


def test_regenerate_uses_goal_override(sales_mini):
    tour = make_two_step_tour(sales_mini)  # interaction guide globally
    tour = set_step_goal(tour, "s1", CommunicationGoal.DASHBOARD_SEMANTICS)
    backend = SpyBackend([step_reply()])
    regenerate_step(tour, sales_mini, "s1", backend)
    assert SEMANTICS_GOAL in backend.prompts[0][1]


def test_regenerate_failure_leaves_tour_usable(sales_mini):
    tour = make_two_step_tour(sales_mini)
    backend = MockChat(["nope"])
    with pytest.raises(GenerationFailedError):
        regenerate_step(tour, sales_mini, "s1", backend)
    assert backend.calls == 3
    assert serialize_tour(tour) == serialize_tour(make_two_step_tour(sales_mini))


def test_mock_chat_from_dir(tmp_path):
    fixtures = write_replies(tmp_path / "replies", ["one", "two"])
    backend = MockChat.from_dir(fixtures)
    assert backend.complete("s", "u") == "one"
    assert backend.complete("s", "u") == "two"
    assert backend.complete("s", "u") == "two"  # last reply repeats
