"""Tours: the authored artifact, its editing operations, and serialization.

A tour is an immutable value; every editing operation returns a new tour with
the revision bumped. Structural edits (inserting or deleting steps) re-replay
the whole tour and flag steps whose stored coordinated-view change no longer
reproduces, instead of silently rewriting author-visible content.
"""
from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

from .canonical import canonical_json
from .dashboard import Dashboard, DashboardState, state_from_dict, state_to_dict
from .errors import (
    PositionError,
    SpecSyntaxError,
    StateMismatchError,
    UnknownIdError,
)
from .events import (
    CoordinatedViewChange,
    InteractionEvent,
    InteractionLog,
    apply_event,
    change_from_dict,
    change_to_dict,
    event_from_dict,
    event_to_dict,
)
from .digest import state_digest


class CommunicationGoal(str, Enum):
    DASHBOARD_SEMANTICS = "dashboardSemantics"
    INTERACTION_GUIDE = "interactionGuide"
    DATA_FACTS = "dataFacts"


class ContentOrigin(str, Enum):
    GENERATED = "generated"
    TEMPLATE = "template"
    MANUAL = "manual"


class StepKind(str, Enum):
    INTERACTIVE = "interactive"
    STANDALONE = "standalone"


def _blank_to_none(value: str | None) -> str | None:
    return value if value else None


@dataclass(frozen=True)
class TourMetadata:
    goal: CommunicationGoal
    instruction: str | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "instruction", _blank_to_none(self.instruction))
        object.__setattr__(self, "title", _blank_to_none(self.title))


@dataclass(frozen=True)
class TourStep:
    id: str
    kind: StepKind
    event: InteractionEvent | None = None
    change: CoordinatedViewChange | None = None
    title: str = ""
    description: str = ""
    goal_override: CommunicationGoal | None = None
    step_instruction: str | None = None
    overlay_offset: tuple[float, float] | None = None
    content_origin: ContentOrigin | None = None
    stale: bool = False

    def __post_init__(self) -> None:
        interactive = self.kind == StepKind.INTERACTIVE
        if interactive != (self.event is not None and self.change is not None):
            raise SpecSyntaxError(
                f"step '{self.id}': interactive steps carry an interaction, "
                "standalone steps do not"
            )

    @property
    def is_interactive(self) -> bool:
        return self.kind == StepKind.INTERACTIVE


@dataclass(frozen=True)
class Tour:
    id: str
    dashboard_id: str
    metadata: TourMetadata
    start_state: DashboardState
    steps: tuple[TourStep, ...]
    revision: int = 1

    def step_index(self, step_id: str) -> int:
        for i, step in enumerate(self.steps):
            if step.id == step_id:
                return i
        raise UnknownIdError(f"unknown step '{step_id}'", details={"step": step_id})

    def step(self, step_id: str) -> TourStep:
        return self.steps[self.step_index(step_id)]

    def stale_step_ids(self) -> list[str]:
        return [s.id for s in self.steps if s.stale]


def new_tour_id() -> str:
    return uuid.uuid4().hex[:12]


def _next_step_ids(existing: tuple[TourStep, ...], count: int) -> list[str]:
    taken = {s.id for s in existing}
    out: list[str] = []
    n = 1
    while len(out) < count:
        candidate = f"s{n}"
        if candidate not in taken:
            taken.add(candidate)
            out.append(candidate)
        n += 1
    return out


# ---------------------------------------------------------------------------
# Construction and replay
# ---------------------------------------------------------------------------

def create_tour(
    log: InteractionLog, meta: TourMetadata, tour_id: str | None = None
) -> Tour:
    """Compile a recorded interaction log into a tour skeleton."""
    ids = _next_step_ids((), len(log.steps))
    steps = tuple(
        TourStep(id=ids[i], kind=StepKind.INTERACTIVE,
                 event=step.event, change=step.change)
        for i, step in enumerate(log.steps)
    )
    return Tour(
        id=tour_id or new_tour_id(),
        dashboard_id=log.dashboard_id,
        metadata=meta,
        start_state=log.start_state,
        steps=steps,
        revision=1,
    )


def state_at(d: Dashboard, t: Tour, position: int) -> DashboardState:
    """Dashboard state just before step `position` (fold of steps 0..position-1)."""
    state = t.start_state
    for step in t.steps[:position]:
        if step.is_interactive:
            state, _ = apply_event(d, state, step.event)
    return state


def revalidate(t: Tour, d: Dashboard) -> Tour:
    """Re-replay every interactive step and flag those whose stored change drifts."""
    state = t.start_state
    steps = []
    for step in t.steps:
        if step.is_interactive:
            state, change = apply_event(d, state, step.event)
            stale = change != step.change
            steps.append(replace(step, stale=stale) if stale != step.stale else step)
        else:
            steps.append(step)
    return replace(t, steps=tuple(steps))


# ---------------------------------------------------------------------------
# Editing operations (each returns a new tour with revision + 1)
# ---------------------------------------------------------------------------

def _check_position(t: Tour, position: int) -> None:
    if not 0 <= position <= len(t.steps):
        raise PositionError(
            f"position {position} out of range 0..{len(t.steps)}",
            details={"position": position, "steps": len(t.steps)},
        )


def insert_interactive_steps(
    t: Tour, d: Dashboard, position: int, log: InteractionLog
) -> Tour:
    """Splice a freshly recorded log in at `position`.

    The log must have been recorded from the replayed state at that position;
    a state digest mismatch is rejected rather than silently accepted.
    """
    _check_position(t, position)
    expected = state_at(d, t, position)
    if state_digest(log.start_state) != state_digest(expected):
        raise StateMismatchError(
            "interaction log was recorded against a different state than "
            f"the tour replays at position {position}",
            details={"position": position},
        )
    ids = _next_step_ids(t.steps, len(log.steps))
    new_steps = tuple(
        TourStep(id=ids[i], kind=StepKind.INTERACTIVE,
                 event=step.event, change=step.change)
        for i, step in enumerate(log.steps)
    )
    spliced = t.steps[:position] + new_steps + t.steps[position:]
    return revalidate(
        replace(t, steps=spliced, revision=t.revision + 1), d
    )


def insert_standalone_step(t: Tour, position: int, instruction: str) -> Tour:
    """Insert a no-interaction step (context, summary, or transition)."""
    _check_position(t, position)
    if not instruction:
        raise SpecSyntaxError("standalone step needs a non-empty instruction")
    step_id = _next_step_ids(t.steps, 1)[0]
    step = TourStep(id=step_id, kind=StepKind.STANDALONE, step_instruction=instruction)
    spliced = t.steps[:position] + (step,) + t.steps[position:]
    return replace(t, steps=spliced, revision=t.revision + 1)


def delete_step(t: Tour, d: Dashboard, step_id: str) -> Tour:
    index = t.step_index(step_id)
    remaining = t.steps[:index] + t.steps[index + 1:]
    return revalidate(replace(t, steps=remaining, revision=t.revision + 1), d)


def edit_step_content(
    t: Tour, step_id: str, title: str | None = None, description: str | None = None
) -> Tour:
    index = t.step_index(step_id)
    step = t.steps[index]
    if title is not None or description is not None:
        step = replace(
            step,
            title=title if title is not None else step.title,
            description=description if description is not None else step.description,
            content_origin=ContentOrigin.MANUAL,
        )
    steps = t.steps[:index] + (step,) + t.steps[index + 1:]
    return replace(t, steps=steps, revision=t.revision + 1)


def set_step_goal(
    t: Tour, step_id: str,
    goal_override: CommunicationGoal | None,
    step_instruction: str | None = None,
) -> Tour:
    index = t.step_index(step_id)
    step = replace(
        t.steps[index],
        goal_override=goal_override,
        step_instruction=_blank_to_none(step_instruction)
        if step_instruction is not None else t.steps[index].step_instruction,
    )
    steps = t.steps[:index] + (step,) + t.steps[index + 1:]
    return replace(t, steps=steps, revision=t.revision + 1)


def set_step_overlay_offset(
    t: Tour, step_id: str, offset: tuple[float, float] | None
) -> Tour:
    """Persist a dragged overlay position; content and origin stay untouched."""
    index = t.step_index(step_id)
    step = replace(t.steps[index], overlay_offset=offset)
    steps = t.steps[:index] + (step,) + t.steps[index + 1:]
    return replace(t, steps=steps, revision=t.revision + 1)


def set_tour_metadata(t: Tour, meta: TourMetadata) -> Tour:
    # content stays as-is until the author explicitly regenerates
    return replace(t, metadata=meta, revision=t.revision + 1)


def with_step(t: Tour, index: int, step: TourStep) -> Tour:
    steps = t.steps[:index] + (step,) + t.steps[index + 1:]
    return replace(t, steps=steps)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def metadata_to_dict(meta: TourMetadata) -> dict[str, Any]:
    return {
        "goal": meta.goal.value,
        "instruction": meta.instruction,
        "title": meta.title,
    }


def metadata_from_dict(doc: Any, path: str = "metadata") -> TourMetadata:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected object")
    try:
        goal = CommunicationGoal(doc.get("goal"))
    except ValueError:
        valid = ", ".join(g.value for g in CommunicationGoal)
        raise SpecSyntaxError(f"{path}.goal: expected one of {valid}")
    instruction = doc.get("instruction")
    title = doc.get("title")
    if instruction is not None and not isinstance(instruction, str):
        raise SpecSyntaxError(f"{path}.instruction: expected string or null")
    if title is not None and not isinstance(title, str):
        raise SpecSyntaxError(f"{path}.title: expected string or null")
    return TourMetadata(goal=goal, instruction=instruction, title=title)


def step_to_dict(step: TourStep) -> dict[str, Any]:
    return {
        "id": step.id,
        "kind": step.kind.value,
        "event": event_to_dict(step.event) if step.event else None,
        "coordinatedViewChange": change_to_dict(step.change) if step.change else None,
        "title": step.title,
        "description": step.description,
        "goalOverride": step.goal_override.value if step.goal_override else None,
        "stepInstruction": step.step_instruction,
        "overlayOffset": (
            {"dx": step.overlay_offset[0], "dy": step.overlay_offset[1]}
            if step.overlay_offset is not None else None
        ),
        "contentOrigin": step.content_origin.value if step.content_origin else None,
        "stale": step.stale,
    }


def step_from_dict(doc: Any, path: str) -> TourStep:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected step object")
    step_id = doc.get("id")
    if not isinstance(step_id, str):
        raise SpecSyntaxError(f"{path}.id: expected string")
    try:
        kind = StepKind(doc.get("kind"))
    except ValueError:
        raise SpecSyntaxError(f"{path}.kind: expected interactive|standalone")
    event_doc = doc.get("event")
    change_doc = doc.get("coordinatedViewChange")
    goal_doc = doc.get("goalOverride")
    origin_doc = doc.get("contentOrigin")
    offset_doc = doc.get("overlayOffset")
    offset = None
    if offset_doc is not None:
        if not isinstance(offset_doc, dict) or "dx" not in offset_doc or "dy" not in offset_doc:
            raise SpecSyntaxError(f"{path}.overlayOffset: expected {{dx, dy}}")
        offset = (offset_doc["dx"], offset_doc["dy"])
    try:
        goal_override = CommunicationGoal(goal_doc) if goal_doc is not None else None
        origin = ContentOrigin(origin_doc) if origin_doc is not None else None
    except ValueError as e:
        raise SpecSyntaxError(f"{path}: {e}")
    return TourStep(
        id=step_id,
        kind=kind,
        event=event_from_dict(event_doc, f"{path}.event") if event_doc is not None else None,
        change=(
            change_from_dict(change_doc, f"{path}.coordinatedViewChange")
            if change_doc is not None else None
        ),
        title=doc.get("title") or "",
        description=doc.get("description") or "",
        goal_override=goal_override,
        step_instruction=doc.get("stepInstruction"),
        overlay_offset=offset,
        content_origin=origin,
        stale=bool(doc.get("stale", False)),
    )


def tour_to_dict(t: Tour) -> dict[str, Any]:
    return {
        "id": t.id,
        "dashboardId": t.dashboard_id,
        "metadata": metadata_to_dict(t.metadata),
        "startState": state_to_dict(t.start_state),
        "revision": t.revision,
        "steps": [step_to_dict(s) for s in t.steps],
    }


def tour_from_dict(doc: Any) -> Tour:
    if not isinstance(doc, dict):
        raise SpecSyntaxError("tour: expected one object")
    tour_id = doc.get("id")
    dashboard_id = doc.get("dashboardId")
    if not isinstance(tour_id, str) or not isinstance(dashboard_id, str):
        raise SpecSyntaxError("tour: missing string 'id' / 'dashboardId'")
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list):
        raise SpecSyntaxError("tour: missing array 'steps'")
    revision = doc.get("revision", 1)
    if not isinstance(revision, int):
        raise SpecSyntaxError("tour.revision: expected integer")
    steps = tuple(
        step_from_dict(s, f"steps[{i}]") for i, s in enumerate(raw_steps)
    )
    seen = set()
    for s in steps:
        if s.id in seen:
            raise SpecSyntaxError(f"tour: duplicate step id '{s.id}'")
        seen.add(s.id)
    return Tour(
        id=tour_id,
        dashboard_id=dashboard_id,
        metadata=metadata_from_dict(doc.get("metadata")),
        start_state=state_from_dict(doc.get("startState", {}), "startState"),
        steps=steps,
        revision=revision,
    )


def parse_tour(text: str) -> Tour:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    return tour_from_dict(doc)


def serialize_tour(t: Tour) -> str:
    return canonical_json(tour_to_dict(t))
