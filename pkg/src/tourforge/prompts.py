"""Prompt assembly for tour content generation.

All builders are pure: equal inputs produce byte-identical prompt text, so
golden-snapshot tests stay stable. The communication-goal definitions and the
tour-prompt wording are fixed constants; tests pin them by substring.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .canonical import compact_json
from .dashboard import Dashboard
from .errors import UnknownIdError
from .events import change_to_dict, event_to_dict
from .tours import CommunicationGoal, Tour

GOAL_DEFINITIONS: dict[CommunicationGoal, str] = {
    CommunicationGoal.DASHBOARD_SEMANTICS: (
        "Focus on explaining chart encoding and markers and the purpose of "
        "different filters, dropdowns, and other UI widgets in this dashboard tour."
    ),
    CommunicationGoal.INTERACTION_GUIDE: (
        "Focus on explaining interaction and the effects of interactions on "
        "other coordinated views for this dashboard tour."
    ),
    CommunicationGoal.DATA_FACTS: (
        "Focus on highlighting notable insights, trends, comparisons, and "
        "outliers in the data for this dashboard tour."
    ),
}

CONTEXT_PROMPT_PREFIX = (
    "You are an assistant that writes guided tours for data dashboards. "
    "The following JSON object describes the dashboard: its charts and their "
    "encodings, UI widgets, text content, datasets (columns only), and the "
    "actions that link views together. Use it as context for every later "
    "request about this dashboard.\n\n"
)

# Correction appended when a reply cannot be parsed into the expected shape.
TOUR_CORRECTION_DIRECTIVE = (
    "\n\nYour previous reply could not be used. Return only a JSON object of "
    "the form {'title': <tour title>, 'steps': [...]} where 'steps' contains "
    "exactly {count} objects, each with the two keys 'title' and "
    "'description'. Do not include any other text."
)

STEP_CORRECTION_DIRECTIVE = (
    "\n\nYour previous reply could not be used. Return only a JSON object "
    "with exactly the two keys 'title' and 'description'. Do not include any "
    "other text."
)


@dataclass(frozen=True)
class PromptMessage:
    role: str  # "system" | "user"
    content: str


def goal_definition(goal: CommunicationGoal) -> str:
    return GOAL_DEFINITIONS[goal]


def build_context_prompt(ctx: dict[str, Any]) -> PromptMessage:
    """System message embedding the dashboard metadata document."""
    return PromptMessage(role="system", content=CONTEXT_PROMPT_PREFIX + compact_json(ctx))


def _tour_steps_doc(t: Tour, d: Dashboard) -> dict[str, Any]:
    """The tour structure spliced into prompts: interactive steps carry their
    event and coordinated-view change, standalone steps a null event plus the
    author's instruction."""
    steps = []
    for step in t.steps:
        if step.is_interactive:
            event_doc = event_to_dict(step.event)
            event_doc["zoneName"] = d.zone(step.event.zone_id).display_name
            entry: dict[str, Any] = {
                "event": event_doc,
                "coordinatedViewChange": change_to_dict(step.change),
            }
        else:
            entry = {"event": None, "coordinatedViewChange": None}
        if step.step_instruction:
            entry["stepInstruction"] = step.step_instruction
        steps.append(entry)
    return {"steps": steps}


def build_tour_prompt(t: Tour, d: Dashboard) -> PromptMessage:
    """User message asking for title + description of every step."""
    goal = goal_definition(t.metadata.goal)
    parts = [
        "The following is a JSON object outlining the structure of a dashboard "
        f"tour - {compact_json(_tour_steps_doc(t, d))}. The key 'steps' includes "
        "a list of author-performed interactions/events. The "
        "'coordinatedViewChange' key in each event represents changes to the "
        "coordinated views of the dashboard as a result of the event. The "
        "author also provided some metadata about the tour including a "
        f"communication goal: {goal}"
    ]
    if t.metadata.instruction:
        parts.append(f"The author also provided this instruction: {t.metadata.instruction}")
    if t.metadata.title:
        parts.append(
            f"The author titled the tour \"{t.metadata.title}\"; use that title "
            "as context and keep it."
        )
    parts.append(
        "Generate a title and short description for each event/step in natural "
        "language. Craft a story out of the steps and write the title and "
        "description accordingly. Return in the following JSON format "
        "{'title': <tour title>, 'steps': [<one object per step with two keys, "
        "'title' and 'description'>]}."
    )
    return PromptMessage(role="user", content="\n".join(parts))


def build_step_prompt(
    t: Tour,
    d: Dashboard,
    step_index: int,
    effective_goal: CommunicationGoal,
    extra_instruction: str | None = None,
) -> PromptMessage:
    """User message asking to rewrite a single step under a (possibly
    overridden) goal, with the whole tour as context."""
    if not 0 <= step_index < len(t.steps):
        raise UnknownIdError(f"tour has no step {step_index}",
                             details={"step": step_index})
    doc = _tour_steps_doc(t, d)
    for step, entry in zip(t.steps, doc["steps"]):
        entry["title"] = step.title
        entry["description"] = step.description
    goal = goal_definition(effective_goal)
    parts = [
        "The following is a JSON object outlining the structure of a dashboard "
        f"tour - {compact_json(doc)}. The key 'steps' includes a list of "
        "author-performed interactions/events with their current 'title' and "
        "'description'. The 'coordinatedViewChange' key in each event "
        "represents changes to the coordinated views of the dashboard as a "
        "result of the event.",
        f"Rewrite only step {step_index} (0-based) of this tour. {goal}",
    ]
    if extra_instruction:
        parts.append(f"The author also provided this instruction for the step: {extra_instruction}")
    parts.append(
        "Return in the following JSON format {'title': <step title>, "
        "'description': <step description>}."
    )
    return PromptMessage(role="user", content="\n".join(parts))
