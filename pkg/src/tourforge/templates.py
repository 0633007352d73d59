"""Deterministic, LLM-free content generation and dynamic field references.

The template generator is a pure function of (tour, dashboard): it names the
recorded event and its coordinated-view effects, reports extremes of the
resulting views, or explains encodings and widget options, depending on the
communication goal. Descriptions may embed `{sum:Zone.y}`-style placeholders
that playback resolves against the live per-step state.
"""
from __future__ import annotations

import logging
import re
from dataclasses import replace
from typing import Any

from .dashboard import (
    Aggregate,
    Behavior,
    Channel,
    ChartZone,
    Dashboard,
    DashboardState,
    WidgetKind,
    WidgetZone,
    aggregate_view,
    visible_rows,
)
from .events import (
    Brush,
    ChangeEntry,
    ClearSelection,
    CoordinatedViewChange,
    InteractionEvent,
    MarkSelection,
    WidgetChange,
    apply_event,
)
from .tours import CommunicationGoal, ContentOrigin, StepKind, Tour, TourMetadata

logger = logging.getLogger(__name__)

PLACEHOLDER_RE = re.compile(
    r"\{(field|sum|avg|count|min|max):([^{}.]+)\.(x|y|color)\}"
)


def format_number(value: Any) -> str:
    """Render 30.0 as '30' and keep two decimals otherwise."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return str(value)
    text = f"{float(value):.2f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


# ---------------------------------------------------------------------------
# Phrases
# ---------------------------------------------------------------------------

def _selection_values(e: MarkSelection) -> str:
    tuples = []
    for t in e.selected_tuples:
        tuples.append("/".join(format_number(v) for _, v in t))
    return ", ".join(tuples)


def _event_gerund(d: Dashboard, e: InteractionEvent) -> str:
    zone = d.zone(e.zone_id)
    name = zone.display_name
    if isinstance(e, MarkSelection):
        return f"Selecting {_selection_values(e)} in {name}"
    if isinstance(e, Brush):
        spans = " and ".join(
            f"{p.field} between {format_number(p.values[0])} and {format_number(p.values[1])}"
            for p in e.extents
        )
        return f"Brushing {spans} in {name}"
    if isinstance(e, WidgetChange):
        verb = "Pressing" if (
            isinstance(zone, WidgetZone) and zone.widget_kind == WidgetKind.BUTTON
        ) else "Choosing"
        return f"{verb} {', '.join(e.new_value)} in {name}"
    return f"Clearing the selection in {name}"


def _event_verb(d: Dashboard, e: InteractionEvent) -> str:
    if isinstance(e, MarkSelection):
        return "Select"
    if isinstance(e, Brush):
        return "Brush"
    if isinstance(e, WidgetChange):
        zone = d.zone(e.zone_id)
        if isinstance(zone, WidgetZone) and zone.widget_kind == WidgetKind.BUTTON:
            return "Press"
        return "Set"
    return "Clear"


def _entry_phrase(d: Dashboard, entry: ChangeEntry) -> str:
    target = d.zone(entry.target_zone_id).display_name
    if entry.behavior == Behavior.HIGHLIGHT:
        if entry.applied_predicates:
            return f"highlights matching marks in {target}"
        return f"clears highlights in {target}"
    if entry.applied_predicates:
        return f"filters {target} from {entry.rows_before} to {entry.rows_after} rows"
    return f"restores {target} from {entry.rows_before} to {entry.rows_after} rows"


def _agg_words(chart: ChartZone) -> tuple[str, str]:
    """(prose phrase, placeholder op) for a chart's y encoding."""
    y = chart.encoding(Channel.Y)
    assert y is not None
    if y.aggregate == Aggregate.COUNT:
        return "count of rows", "count"
    if y.aggregate == Aggregate.AVG:
        return f"average {y.field}", "avg"
    return f"sum of {y.field}", "sum"  # SUM, and NONE rolled up as sum


def _interaction_sentence(d: Dashboard, e: InteractionEvent,
                          change: CoordinatedViewChange) -> str:
    lead = _event_gerund(d, e)
    if not change.entries:
        return f"{lead} does not change any other view."
    effects = " and ".join(_entry_phrase(d, entry) for entry in change.entries)
    return f"{lead} {effects}."


def _placeholder_sentence(d: Dashboard, change: CoordinatedViewChange) -> str | None:
    for entry in change.entries:
        if entry.behavior != Behavior.FILTER:
            continue
        zone = d.zone(entry.target_zone_id)
        if not isinstance(zone, ChartZone):
            continue
        phrase, op = _agg_words(zone)
        name = zone.display_name
        return f"The {phrase} visible in {name} is now {{{op}:{name}.y}}."
    return None


def _interaction_guide_description(d: Dashboard, e: InteractionEvent,
                                   change: CoordinatedViewChange) -> str:
    parts = [_interaction_sentence(d, e, change)]
    extra = _placeholder_sentence(d, change)
    if extra:
        parts.append(extra)
    return " ".join(parts)


def _data_facts_description(d: Dashboard, e: InteractionEvent,
                            change: CoordinatedViewChange,
                            state_after: DashboardState) -> str:
    target: ChartZone | None = None
    view: list[tuple[Any, Any]] | None = None
    for entry in change.entries:
        zone = d.zone(entry.target_zone_id)
        if isinstance(zone, ChartZone):
            target = zone
            view = list(entry.view_after)
            break
    if target is None:
        zone = d.zone(e.zone_id)
        if isinstance(zone, ChartZone):
            target = zone
            view = aggregate_view(d, state_after, zone.id)
    if target is None or view is None:
        return f"{_interaction_sentence(d, e, change)}"
    name = target.display_name
    phrase, _ = _agg_words(target)
    if not view:
        return f"After this step, no data is visible in {name}."
    if len(view) == 1:
        cat, val = view[0]
        return (f"In {name}, {cat} is the only visible category, "
                f"with a {phrase} of {format_number(val)}.")
    max_cat, max_val = max(view, key=lambda cv: cv[1])
    min_cat, min_val = min(view, key=lambda cv: cv[1])
    return (f"In {name}, {max_cat} has the highest {phrase} "
            f"({format_number(max_val)}) and {min_cat} the lowest "
            f"({format_number(min_val)}).")


def _semantics_description(d: Dashboard, e: InteractionEvent) -> str:
    zone = d.zone(e.zone_id)
    if isinstance(zone, ChartZone):
        x = zone.encoding(Channel.X)
        y = zone.encoding(Channel.Y)
        color = zone.encoding(Channel.COLOR)
        phrase, _ = _agg_words(zone)
        text = (f"{zone.display_name} is a {zone.chart_kind.value} chart showing "
                f"the {phrase} for each {x.field}.")
        if color is not None:
            text += f" Marks are colored by {color.field}."
        return text
    if isinstance(zone, WidgetZone):
        options = ", ".join(zone.options)
        return (f"{zone.display_name} is a {zone.widget_kind.value} that "
                f"filters the data by '{zone.target_field}'. "
                f"Available options: {options}.")
    return f"{zone.display_name} is part of this dashboard."


# ---------------------------------------------------------------------------
# Template generation
# ---------------------------------------------------------------------------

def _step_content(d: Dashboard, t: Tour, index: int,
                  state_after: DashboardState) -> tuple[str, str]:
    step = t.steps[index]
    number = index + 1
    if step.kind == StepKind.STANDALONE:
        return f"Step {number}", step.step_instruction or ""
    goal = step.goal_override or t.metadata.goal
    event, change = step.event, step.change
    title = f"Step {number}: {_event_verb(d, event)} {d.zone(event.zone_id).display_name}"
    if goal == CommunicationGoal.INTERACTION_GUIDE:
        description = _interaction_guide_description(d, event, change)
    elif goal == CommunicationGoal.DATA_FACTS:
        description = _data_facts_description(d, event, change, state_after)
    else:
        description = _semantics_description(d, event)
    return title, description


def _states_after_steps(d: Dashboard, t: Tour) -> list[DashboardState]:
    states = []
    state = t.start_state
    for step in t.steps:
        if step.is_interactive:
            state, _ = apply_event(d, state, step.event)
        states.append(state)
    return states


def template_generate(t: Tour, d: Dashboard, only_step: int | None = None) -> Tour:
    """Deterministic content for every step (or one step) without any backend."""
    if not t.steps:
        return t
    states = _states_after_steps(d, t)
    steps = []
    for i, step in enumerate(t.steps):
        if only_step is not None and i != only_step:
            steps.append(step)
            continue
        title, description = _step_content(d, t, i, states[i])
        steps.append(replace(step, title=title, description=description,
                             content_origin=ContentOrigin.TEMPLATE))
    metadata = t.metadata
    if only_step is None and metadata.title is None:
        metadata = TourMetadata(goal=metadata.goal,
                                instruction=metadata.instruction,
                                title=f"A tour of {d.title}")
    return replace(t, steps=tuple(steps), metadata=metadata,
                   revision=t.revision + 1)


# ---------------------------------------------------------------------------
# Placeholder rendering
# ---------------------------------------------------------------------------

def render_placeholders(text: str, d: Dashboard, s: DashboardState) -> str:
    """Resolve `{op:Zone.channel}` references against the current state.

    Unknown or unresolvable references stay verbatim (with a logged warning);
    malformed tokens never match and also stay verbatim. Best-effort by design.
    """

    def resolve(match: re.Match) -> str:
        op, zone_name, channel = match.group(1), match.group(2), match.group(3)
        zone = d.find_zone_by_name(zone_name)
        if not isinstance(zone, ChartZone):
            logger.warning("placeholder %s: no chart named '%s'", match.group(0), zone_name)
            return match.group(0)
        encoding = zone.encoding(Channel(channel))
        if encoding is None:
            logger.warning("placeholder %s: chart '%s' has no %s encoding",
                           match.group(0), zone_name, channel)
            return match.group(0)
        if op == "field":
            return encoding.field
        ds = d.dataset(zone.dataset)
        ci = ds.column_index(encoding.field)
        values = [ds.rows[i][ci] for i in visible_rows(d, s, zone.id)]
        if op == "count":
            return str(len(values))
        try:
            if op == "sum":
                return format_number(sum(values) if values else 0)
            if not values:
                return "n/a"
            if op == "avg":
                return format_number(sum(values) / len(values))
            if op == "min":
                return format_number(min(values))
            return format_number(max(values))
        except TypeError:
            logger.warning("placeholder %s: field '%s' is not numeric",
                           match.group(0), encoding.field)
            return match.group(0)

    return PLACEHOLDER_RE.sub(resolve, text)
