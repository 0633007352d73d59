"""Event application, coordinated-view changes, and recording sessions."""
from __future__ import annotations

import random

import pytest

from helpers import (
    east_selection,
    variant_with_brush_action,
    variant_with_button,
    variant_with_highlight_action,
    west_widget_change,
)
from randgen import random_dashboard, random_event

from tourforge.dashboard import (
    Behavior,
    DashboardState,
    Predicate,
    PredicateOp,
)
from tourforge.errors import (
    EventValidationError,
    UnknownReferenceError,
    ZoneKindError,
)
from tourforge.events import (
    Brush,
    ClearSelection,
    MarkSelection,
    WidgetChange,
    apply_event,
    log_from_dict,
    log_to_dict,
    parse_interaction_log,
    record_event,
    replay_log,
    selection_tuple,
    serialize_interaction_log,
    start_recording,
    stop_recording,
)


def test_mark_selection_filters_target(sales_mini):
    state, change = apply_event(sales_mini, DashboardState.initial(), east_selection())
    assert len(change.entries) == 1
    entry = change.entries[0]
    assert entry.target_zone_id == "product-chart"
    assert entry.behavior == Behavior.FILTER
    assert entry.rows_before == 4
    assert entry.rows_after == 2
    assert entry.view_after == (("A", 10), ("B", 20))
    assert entry.applied_predicates == (
        Predicate("region", PredicateOp.EQUALS, ("East",)),
    )
    # the source chart itself is not filtered
    assert "region-chart" not in state.predicates


def test_widget_all_on_initial_is_noop(sales_mini):
    state, change = apply_event(
        sales_mini, DashboardState.initial(),
        WidgetChange(zone_id="region-filter", new_value=("All",)),
    )
    assert state == DashboardState.initial()
    assert change.entries == ()


def test_clear_selection_inverts_mark_selection(sales_mini):
    s0 = DashboardState.initial()
    s1, _ = apply_event(sales_mini, s0, east_selection())
    s2, change = apply_event(sales_mini, s1, ClearSelection(zone_id="region-chart"))
    assert s2 == s0
    # the restoring change is reported with no applied predicates
    assert change.entries[0].applied_predicates == ()
    assert change.entries[0].rows_before == 2
    assert change.entries[0].rows_after == 4


def test_widget_change_applies_to_charts_sharing_dataset(sales_mini):
    state, change = apply_event(sales_mini, DashboardState.initial(), west_widget_change())
    # both charts share the Sales dataset; entries follow zone declaration order
    assert [e.target_zone_id for e in change.entries] == ["region-chart", "product-chart"]
    assert state.zone_filters("region-chart") == (
        Predicate("region", PredicateOp.EQUALS, ("West",)),
    )


def test_same_field_replacement_across_sources(sales_mini):
    # select East, then set the dropdown to West: West replaces the region
    # predicate on Product Chart rather than stacking with it
    session = start_recording(sales_mini)
    record_event(session, east_selection())
    change = record_event(session, west_widget_change())
    assert len(session.events) == 2
    by_target = {e.target_zone_id: e for e in change.entries}
    product = by_target["product-chart"]
    assert product.rows_before == 2  # computed against the post-East state
    assert product.rows_after == 2
    assert product.view_after == (("A", 30), ("B", 40))
    assert session.current_state.zone_filters("product-chart") == (
        Predicate("region", PredicateOp.EQUALS, ("West",)),
    )


def test_multi_mark_selection_becomes_in_predicate(sales_mini):
    event = MarkSelection(
        zone_id="region-chart",
        selected_tuples=(
            selection_tuple({"region": "East"}),
            selection_tuple({"region": "West"}),
        ),
    )
    state, _ = apply_event(sales_mini, DashboardState.initial(), event)
    assert state.zone_filters("product-chart") == (
        Predicate("region", PredicateOp.IN, ("East", "West")),
    )


def test_brush_installs_carried_extents():
    d = variant_with_brush_action()
    brush = Brush(
        zone_id="region-chart",
        extents=(Predicate("sales", PredicateOp.RANGE, (10, 25)),),
    )
    state, change = apply_event(d, DashboardState.initial(), brush)
    assert state.zone_filters("product-chart") == (
        Predicate("sales", PredicateOp.RANGE, (10, 25)),
    )
    entry = change.entries[0]
    assert (entry.rows_before, entry.rows_after) == (4, 2)
    assert entry.view_after == (("A", 10), ("B", 20))


def test_highlight_behavior_keeps_rows(sales_mini):
    d = variant_with_highlight_action()
    state, change = apply_event(d, DashboardState.initial(), east_selection())
    entry = change.entries[0]
    assert entry.behavior == Behavior.HIGHLIGHT
    assert entry.rows_before == entry.rows_after == 4
    assert state.zone_highlights("product-chart") == (
        Predicate("region", PredicateOp.EQUALS, ("East",)),
    )
    assert not state.predicates


def test_button_toggles_on_and_off():
    d = variant_with_button()
    press = WidgetChange(zone_id="product-a-button", new_value=("A",))
    s1, _ = apply_event(d, DashboardState.initial(), press)
    assert s1.zone_filters("region-chart") == (
        Predicate("product", PredicateOp.EQUALS, ("A",)),
    )
    s2, _ = apply_event(d, s1, press)
    assert s2 == DashboardState.initial()


def test_checkbox_empty_selection_shows_nothing():
    from helpers import sales_mini_doc
    from tourforge.dashboard import dashboard_from_dict, visible_rows

    doc = sales_mini_doc()
    doc["zones"][2]["widgetKind"] = "checkbox"
    doc["zones"][2]["options"] = ["East", "West"]
    d = dashboard_from_dict(doc)
    state, _ = apply_event(
        d, DashboardState.initial(),
        WidgetChange(zone_id="region-filter", new_value=()),
    )
    assert visible_rows(d, state, "product-chart") == []


# -- validation ---------------------------------------------------------------

def test_event_validation_errors(sales_mini):
    s0 = DashboardState.initial()
    with pytest.raises(UnknownReferenceError):
        apply_event(sales_mini, s0, ClearSelection(zone_id="nope"))
    with pytest.raises(ZoneKindError):
        apply_event(sales_mini, s0, MarkSelection(
            zone_id="region-filter",
            selected_tuples=(selection_tuple({"region": "East"}),)))
    with pytest.raises(EventValidationError):
        apply_event(sales_mini, s0, WidgetChange(
            zone_id="region-filter", new_value=("Mars",)))
    with pytest.raises(EventValidationError):
        apply_event(sales_mini, s0, WidgetChange(
            zone_id="region-filter", new_value=("East", "West")))


# -- recording ------------------------------------------------------------------

def test_start_recording_variants(sales_mini):
    empty = start_recording(sales_mini)
    assert empty.events == []
    mid_state, _ = apply_event(sales_mini, DashboardState.initial(), east_selection())
    mid = start_recording(sales_mini, mid_state)
    assert mid.start_state == mid_state
    other = start_recording(sales_mini)
    record_event(other, east_selection())
    assert empty.events == []  # sessions are independent


def test_invalid_event_leaves_session_unchanged(sales_mini):
    session = start_recording(sales_mini)
    record_event(session, east_selection())
    with pytest.raises(EventValidationError):
        record_event(session, WidgetChange(zone_id="region-filter", new_value=("Mars",)))
    assert len(session.events) == 1


def test_clear_as_first_event_has_empty_change(sales_mini):
    session = start_recording(sales_mini)
    change = record_event(session, ClearSelection(zone_id="region-chart"))
    assert change.entries == ()


def test_stop_recording_and_round_trip(sales_mini):
    session = start_recording(sales_mini)
    record_event(session, east_selection())
    record_event(session, west_widget_change())
    log = stop_recording(session)
    assert log.dashboard_id == "sales-mini"
    assert len(log.steps) == 2
    assert isinstance(log.steps[0].event, MarkSelection)

    again = parse_interaction_log(serialize_interaction_log(log))
    assert again == log

    empty = stop_recording(start_recording(sales_mini))
    assert empty.steps == ()
    assert log_from_dict(log_to_dict(empty)) == empty


def test_replay_determinism_random_sequences(sales_mini):
    rng = random.Random(7)
    for _ in range(20):
        session = start_recording(sales_mini)
        for _ in range(rng.randint(0, 8)):
            event = random_event(rng, sales_mini)
            record_event(session, event)
        log = stop_recording(session)
        replayed = replay_log(sales_mini, log)
        assert [c for _, c in replayed] == [s.change for s in log.steps]
        assert [st for st, _ in replayed] == [state for _, _, state in session.events]


def test_filter_monotonic_for_fresh_installs():
    # rowsAfter <= rowsBefore holds when the installed predicates constrain
    # fields that carried no prior predicate on the target; replacement of an
    # existing predicate may legitimately widen the row set
    rng = random.Random(21)
    for i in range(8):
        d = random_dashboard(rng, f"mono-{i}")
        state = DashboardState.initial()
        for _ in range(6):
            before = state
            state, change = apply_event(d, state, random_event(rng, d))
            for entry in change.entries:
                if entry.behavior != Behavior.FILTER or not entry.applied_predicates:
                    continue
                prior_fields = {p.field for p in before.zone_filters(entry.target_zone_id)}
                if prior_fields & {p.field for p in entry.applied_predicates}:
                    continue
                assert entry.rows_after <= entry.rows_before
