"""Interaction events, coordinated-view computation, and recording sessions.

Events are semantic, not positional: a mark selection carries the data tuples
behind the clicked marks, a widget change carries the chosen option values.
Applying an event to a dashboard state yields the next state plus a
``CoordinatedViewChange`` describing what happened to every linked view.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .canonical import canonical_json
from .dashboard import (
    ALL_SENTINEL,
    Behavior,
    ChartZone,
    Dashboard,
    DashboardState,
    Predicate,
    PredicateOp,
    Trigger,
    WidgetKind,
    WidgetZone,
    aggregate_view,
    predicate_from_dict,
    predicate_to_dict,
    state_from_dict,
    state_to_dict,
    visible_rows,
)
from .errors import EventValidationError, SpecSyntaxError, ZoneKindError

SelectedTuple = tuple[tuple[str, Any], ...]  # conjunction of (field, value) pairs


def selection_tuple(pairs: Mapping[str, Any] | Iterable[tuple[str, Any]]) -> SelectedTuple:
    """Build one selected-mark tuple with a deterministic field order."""
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    return tuple(sorted(items, key=lambda kv: kv[0]))


@dataclass(frozen=True)
class MarkSelection:
    zone_id: str
    selected_tuples: tuple[SelectedTuple, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "selected_tuples",
            tuple(selection_tuple(t) for t in self.selected_tuples),
        )


@dataclass(frozen=True)
class Brush:
    zone_id: str
    extents: tuple[Predicate, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "extents", tuple(self.extents))


@dataclass(frozen=True)
class WidgetChange:
    zone_id: str
    new_value: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "new_value", tuple(self.new_value))


@dataclass(frozen=True)
class ClearSelection:
    zone_id: str


InteractionEvent = MarkSelection | Brush | WidgetChange | ClearSelection


@dataclass(frozen=True)
class ChangeEntry:
    """Effect of one event on one linked view."""

    target_zone_id: str
    behavior: Behavior
    applied_predicates: tuple[Predicate, ...]
    rows_before: int
    rows_after: int
    view_after: tuple[tuple[Any, Any], ...]


@dataclass(frozen=True)
class CoordinatedViewChange:
    entries: tuple[ChangeEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))


# ---------------------------------------------------------------------------
# Event validation
# ---------------------------------------------------------------------------

def _validate_event(d: Dashboard, e: InteractionEvent) -> None:
    zone = d.zone(e.zone_id)  # raises UnknownReferenceError for unknown ids
    if isinstance(e, (MarkSelection, Brush, ClearSelection)):
        if not isinstance(zone, ChartZone):
            raise ZoneKindError(
                f"event requires a chart zone, but '{e.zone_id}' is not one",
                details={"zone": e.zone_id},
            )
        ds = d.dataset(zone.dataset)
        if isinstance(e, MarkSelection):
            if not e.selected_tuples:
                raise EventValidationError("mark selection carries no tuples")
            for t in e.selected_tuples:
                for field, _ in t:
                    if not ds.has_column(field):
                        raise EventValidationError(
                            f"selected tuple names unknown field '{field}'",
                            details={"zone": e.zone_id, "field": field},
                        )
        if isinstance(e, Brush):
            if not e.extents:
                raise EventValidationError("brush carries no extents")
            for p in e.extents:
                if p.op != PredicateOp.RANGE:
                    raise EventValidationError("brush extents must be range predicates")
                if not ds.has_column(p.field):
                    raise EventValidationError(
                        f"brush extent names unknown field '{p.field}'",
                        details={"zone": e.zone_id, "field": p.field},
                    )
    elif isinstance(e, WidgetChange):
        if not isinstance(zone, WidgetZone):
            raise ZoneKindError(
                f"widget change requires a widget zone, but '{e.zone_id}' is not one",
                details={"zone": e.zone_id},
            )
        for v in e.new_value:
            if v not in zone.options:
                raise EventValidationError(
                    f"value '{v}' is not an option of widget '{zone.id}'",
                    details={"zone": zone.id, "value": v},
                )
        if zone.widget_kind in (WidgetKind.DROPDOWN, WidgetKind.RADIO, WidgetKind.BUTTON):
            if len(e.new_value) != 1:
                raise EventValidationError(
                    f"{zone.widget_kind.value} '{zone.id}' takes exactly one value"
                )


# ---------------------------------------------------------------------------
# State arithmetic
# ---------------------------------------------------------------------------

def _replace_by_field(
    existing: tuple[Predicate, ...], incoming: Iterable[Predicate]
) -> tuple[Predicate, ...]:
    incoming = tuple(incoming)
    replaced_fields = {p.field for p in incoming}
    kept = tuple(p for p in existing if p.field not in replaced_fields)
    return kept + incoming


def _remove_fields(
    existing: tuple[Predicate, ...], fields: Iterable[str]
) -> tuple[Predicate, ...]:
    fields = set(fields)
    return tuple(p for p in existing if p.field not in fields)


def _selection_predicates(
    e: MarkSelection, carried_fields: Iterable[str]
) -> list[Predicate]:
    preds = []
    for field in carried_fields:
        values: list[Any] = []
        for t in e.selected_tuples:
            for f_, v in t:
                if f_ == field and v not in values:
                    values.append(v)
        if not values:
            continue  # field not present in the selection, nothing to carry
        if len(values) == 1:
            preds.append(Predicate(field, PredicateOp.EQUALS, (values[0],)))
        else:
            preds.append(Predicate(field, PredicateOp.IN, tuple(values)))
    return preds


def _widget_predicate(zone: WidgetZone, values: tuple[str, ...]) -> Predicate:
    if len(values) == 1:
        return Predicate(zone.target_field, PredicateOp.EQUALS, (values[0],))
    return Predicate(zone.target_field, PredicateOp.IN, values)


def _widget_targets(d: Dashboard, zone: WidgetZone) -> list[tuple[str, Behavior]]:
    """Charts a widget drives: explicit widgetChange actions narrow the set,
    otherwise every chart sharing the widget's dataset is affected."""
    explicit = d.actions_from(zone.id, Trigger.WIDGET_CHANGE)
    if explicit:
        pairs = []
        for a in explicit:
            for t in a.target_zones:
                if (t, a.behavior) not in pairs:
                    pairs.append((t, a.behavior))
        return pairs
    return [
        (c.id, Behavior.FILTER)
        for c in d.charts()
        if c.dataset == zone.dataset
    ]


def apply_event(
    d: Dashboard, s: DashboardState, e: InteractionEvent
) -> tuple[DashboardState, CoordinatedViewChange]:
    """Apply one event; return the next state and the coordinated-view change.

    A new predicate on a field replaces any previous predicate on that field
    for the same target zone. Clearing events (``ClearSelection``, the
    dropdown/radio ``All`` sentinel) remove the corresponding predicates and
    report only the targets where something was actually removed.
    """
    _validate_event(d, e)

    filters = {z: tuple(p) for z, p in s.predicates.items()}
    highlights = {z: tuple(p) for z, p in s.highlights.items()}
    # (target zone, behavior, applied predicates); empty predicates = removal
    touched: list[tuple[str, Behavior, tuple[Predicate, ...]]] = []

    def bucket(behavior: Behavior) -> dict[str, tuple[Predicate, ...]]:
        return filters if behavior == Behavior.FILTER else highlights

    def install(target: str, behavior: Behavior, preds: list[Predicate]) -> None:
        if not preds:
            return
        store = bucket(behavior)
        store[target] = _replace_by_field(store.get(target, ()), preds)
        touched.append((target, behavior, tuple(preds)))

    def remove(target: str, behavior: Behavior, fields: Iterable[str]) -> None:
        store = bucket(behavior)
        before = store.get(target, ())
        after = _remove_fields(before, fields)
        if after != before:
            store[target] = after
            touched.append((target, behavior, ()))

    if isinstance(e, MarkSelection):
        for action in d.actions_from(e.zone_id, Trigger.SELECT):
            preds = _selection_predicates(e, action.carried_fields)
            for target in action.target_zones:
                install(target, action.behavior, preds)
    elif isinstance(e, Brush):
        for action in d.actions_from(e.zone_id, Trigger.BRUSH):
            carried = set(action.carried_fields)
            preds = [p for p in e.extents if p.field in carried]
            for target in action.target_zones:
                install(target, action.behavior, preds)
    elif isinstance(e, ClearSelection):
        for trigger in (Trigger.SELECT, Trigger.BRUSH):
            for action in d.actions_from(e.zone_id, trigger):
                for target in action.target_zones:
                    remove(target, action.behavior, action.carried_fields)
    else:  # WidgetChange
        zone = d.zone(e.zone_id)
        assert isinstance(zone, WidgetZone)
        targets = _widget_targets(d, zone)
        clears = (
            zone.widget_kind in (WidgetKind.DROPDOWN, WidgetKind.RADIO)
            and e.new_value == (ALL_SENTINEL,)
        )
        if clears:
            for target, behavior in targets:
                remove(target, behavior, [zone.target_field])
        elif zone.widget_kind == WidgetKind.BUTTON:
            pred = _widget_predicate(zone, e.new_value)
            pressed = all(
                pred in bucket(behavior).get(target, ())
                for target, behavior in targets
            ) if targets else False
            for target, behavior in targets:
                if pressed:
                    remove(target, behavior, [zone.target_field])
                else:
                    install(target, behavior, [pred])
        else:
            pred = _widget_predicate(zone, e.new_value)
            for target, behavior in targets:
                install(target, behavior, [pred])

    new_state = DashboardState(predicates=filters, highlights=highlights)

    # One entry per (target, behavior) the event actually touched, in the
    # dashboard's zone declaration order.
    seen: set[tuple[str, Behavior]] = set()
    ordered: list[tuple[str, Behavior, tuple[Predicate, ...]]] = []
    for target, behavior, preds in touched:
        key = (target, behavior)
        if key not in seen:
            seen.add(key)
            ordered.append((target, behavior, preds))
    ordered.sort(key=lambda item: (d.zone_index(item[0]),
                                   0 if item[1] == Behavior.FILTER else 1))

    entries = []
    for target, behavior, preds in ordered:
        entries.append(ChangeEntry(
            target_zone_id=target,
            behavior=behavior,
            applied_predicates=preds,
            rows_before=len(visible_rows(d, s, target)),
            rows_after=len(visible_rows(d, new_state, target)),
            view_after=tuple(aggregate_view(d, new_state, target)),
        ))
    return new_state, CoordinatedViewChange(entries=tuple(entries))


# ---------------------------------------------------------------------------
# Recording
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogStep:
    event: InteractionEvent
    change: CoordinatedViewChange


@dataclass(frozen=True)
class InteractionLog:
    dashboard_id: str
    start_state: DashboardState
    steps: tuple[LogStep, ...]


class RecordingSession:
    """Single-writer capture of an author's interaction sequence.

    Each recorded event is applied to the session's running state; the event,
    its coordinated-view change, and the resulting state are stored together
    so replays can be verified exactly.
    """

    def __init__(self, dashboard: Dashboard, start_state: DashboardState):
        self.dashboard = dashboard
        self.start_state = start_state
        self.events: list[tuple[InteractionEvent, CoordinatedViewChange, DashboardState]] = []

    @property
    def current_state(self) -> DashboardState:
        return self.events[-1][2] if self.events else self.start_state

    def record(self, event: InteractionEvent) -> CoordinatedViewChange:
        # apply_event validates before any mutation, so a failure leaves the
        # session untouched
        new_state, change = apply_event(self.dashboard, self.current_state, event)
        self.events.append((event, change, new_state))
        return change

    def stop(self) -> InteractionLog:
        return InteractionLog(
            dashboard_id=self.dashboard.id,
            start_state=self.start_state,
            steps=tuple(LogStep(event=e, change=c) for e, c, _ in self.events),
        )


def start_recording(d: Dashboard, s: DashboardState | None = None) -> RecordingSession:
    return RecordingSession(d, s if s is not None else DashboardState.initial())


def record_event(session: RecordingSession, e: InteractionEvent) -> CoordinatedViewChange:
    return session.record(e)


def stop_recording(session: RecordingSession) -> InteractionLog:
    return session.stop()


def replay_log(d: Dashboard, log: InteractionLog) -> list[tuple[DashboardState, CoordinatedViewChange]]:
    """Fold apply_event over a log from its start state."""
    out = []
    state = log.start_state
    for step in log.steps:
        state, change = apply_event(d, state, step.event)
        out.append((state, change))
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def event_to_dict(e: InteractionEvent) -> dict[str, Any]:
    if isinstance(e, MarkSelection):
        return {
            "type": "markSelection",
            "zoneId": e.zone_id,
            "selectedTuples": [dict(t) for t in e.selected_tuples],
        }
    if isinstance(e, Brush):
        return {
            "type": "brush",
            "zoneId": e.zone_id,
            "extents": [predicate_to_dict(p) for p in e.extents],
        }
    if isinstance(e, WidgetChange):
        return {"type": "widgetChange", "zoneId": e.zone_id, "newValue": list(e.new_value)}
    return {"type": "clearSelection", "zoneId": e.zone_id}


def event_from_dict(doc: Any, path: str = "event") -> InteractionEvent:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected event object")
    etype = doc.get("type")
    zone_id = doc.get("zoneId")
    if not isinstance(zone_id, str):
        raise SpecSyntaxError(f"{path}.zoneId: expected string")
    if etype == "markSelection":
        tuples = doc.get("selectedTuples")
        if not isinstance(tuples, list):
            raise SpecSyntaxError(f"{path}.selectedTuples: expected array")
        parsed = []
        for i, t in enumerate(tuples):
            if not isinstance(t, dict):
                raise SpecSyntaxError(f"{path}.selectedTuples[{i}]: expected object")
            parsed.append(selection_tuple(t))
        return MarkSelection(zone_id=zone_id, selected_tuples=tuple(parsed))
    if etype == "brush":
        extents = doc.get("extents")
        if not isinstance(extents, list):
            raise SpecSyntaxError(f"{path}.extents: expected array")
        return Brush(
            zone_id=zone_id,
            extents=tuple(
                predicate_from_dict(p, f"{path}.extents[{i}]")
                for i, p in enumerate(extents)
            ),
        )
    if etype == "widgetChange":
        values = doc.get("newValue")
        if not isinstance(values, list):
            raise SpecSyntaxError(f"{path}.newValue: expected array")
        return WidgetChange(zone_id=zone_id, new_value=tuple(values))
    if etype == "clearSelection":
        return ClearSelection(zone_id=zone_id)
    raise SpecSyntaxError(f"{path}.type: unknown event type {etype!r}")


def change_to_dict(c: CoordinatedViewChange) -> dict[str, Any]:
    return {
        "entries": [
            {
                "targetZoneId": entry.target_zone_id,
                "behavior": entry.behavior.value,
                "appliedPredicates": [predicate_to_dict(p) for p in entry.applied_predicates],
                "rowsBefore": entry.rows_before,
                "rowsAfter": entry.rows_after,
                "viewAfter": [[cat, val] for cat, val in entry.view_after],
            }
            for entry in c.entries
        ]
    }


def change_from_dict(doc: Any, path: str = "coordinatedViewChange") -> CoordinatedViewChange:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected object")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list):
        raise SpecSyntaxError(f"{path}.entries: expected array")
    entries = []
    for i, entry in enumerate(raw_entries):
        epath = f"{path}.entries[{i}]"
        if not isinstance(entry, dict):
            raise SpecSyntaxError(f"{epath}: expected object")
        view_after = entry.get("viewAfter")
        if not isinstance(view_after, list):
            raise SpecSyntaxError(f"{epath}.viewAfter: expected array")
        preds = entry.get("appliedPredicates")
        if not isinstance(preds, list):
            raise SpecSyntaxError(f"{epath}.appliedPredicates: expected array")
        try:
            behavior = Behavior(entry.get("behavior"))
        except ValueError:
            raise SpecSyntaxError(f"{epath}.behavior: expected filter|highlight")
        entries.append(ChangeEntry(
            target_zone_id=str(entry.get("targetZoneId")),
            behavior=behavior,
            applied_predicates=tuple(
                predicate_from_dict(p, f"{epath}.appliedPredicates[{j}]")
                for j, p in enumerate(preds)
            ),
            rows_before=int(entry.get("rowsBefore", 0)),
            rows_after=int(entry.get("rowsAfter", 0)),
            view_after=tuple((v[0], v[1]) for v in view_after),
        ))
    return CoordinatedViewChange(entries=tuple(entries))


def log_to_dict(log: InteractionLog) -> dict[str, Any]:
    # the key name `coordinatedViewChange` is load-bearing: generation prompts
    # reference it by name
    return {
        "dashboardId": log.dashboard_id,
        "startState": state_to_dict(log.start_state),
        "steps": [
            {
                "event": event_to_dict(step.event),
                "coordinatedViewChange": change_to_dict(step.change),
            }
            for step in log.steps
        ],
    }


def log_from_dict(doc: Any) -> InteractionLog:
    if not isinstance(doc, dict):
        raise SpecSyntaxError("interaction log: expected one object")
    dashboard_id = doc.get("dashboardId")
    if not isinstance(dashboard_id, str):
        raise SpecSyntaxError("interaction log: missing string 'dashboardId'")
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list):
        raise SpecSyntaxError("interaction log: missing array 'steps'")
    steps = []
    for i, step in enumerate(raw_steps):
        path = f"steps[{i}]"
        if not isinstance(step, dict):
            raise SpecSyntaxError(f"{path}: expected object")
        steps.append(LogStep(
            event=event_from_dict(step.get("event"), f"{path}.event"),
            change=change_from_dict(
                step.get("coordinatedViewChange"), f"{path}.coordinatedViewChange"
            ),
        ))
    return InteractionLog(
        dashboard_id=dashboard_id,
        start_state=state_from_dict(doc.get("startState", {}), "startState"),
        steps=tuple(steps),
    )


def parse_interaction_log(text: str) -> InteractionLog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    return log_from_dict(doc)


def serialize_interaction_log(log: InteractionLog) -> str:
    return canonical_json(log_to_dict(log))
