"""Shared builders for dashboards, tours, and canned generation replies."""
from __future__ import annotations

import json
from pathlib import Path

from tourforge.dashboard import Dashboard, dashboard_from_dict
from tourforge.events import (
    InteractionLog,
    MarkSelection,
    WidgetChange,
    selection_tuple,
    start_recording,
    stop_recording,
)
from tourforge.tours import CommunicationGoal, Tour, TourMetadata, create_tour

DATA_DIR = Path(__file__).parent / "data"


def sales_mini_doc() -> dict:
    return json.loads((DATA_DIR / "sales-mini.json").read_text(encoding="utf-8"))


def variant_with_brush_action() -> Dashboard:
    """sales-mini plus a brush action carrying `sales` to Product Chart."""
    doc = sales_mini_doc()
    doc["actions"].append({
        "id": "a-region-brush",
        "sourceZone": "region-chart",
        "targetZones": ["product-chart"],
        "trigger": "brush",
        "behavior": "filter",
        "carriedFields": ["sales"],
    })
    return dashboard_from_dict(doc)


def variant_with_button() -> Dashboard:
    """sales-mini plus a one-option button widget over `product`."""
    doc = sales_mini_doc()
    doc["zones"].append({
        "id": "product-a-button",
        "bounds": {"x": 240, "y": 300, "w": 120, "h": 40},
        "type": "widget",
        "widgetKind": "button",
        "targetField": "product",
        "dataset": "Sales",
        "options": ["A"],
        "label": "Only A",
    })
    return dashboard_from_dict(doc)


def variant_with_highlight_action() -> Dashboard:
    """sales-mini where the select action highlights instead of filtering."""
    doc = sales_mini_doc()
    doc["actions"][0]["behavior"] = "highlight"
    return dashboard_from_dict(doc)


def east_selection() -> MarkSelection:
    return MarkSelection(
        zone_id="region-chart",
        selected_tuples=(selection_tuple({"region": "East"}),),
    )


def west_widget_change() -> WidgetChange:
    return WidgetChange(zone_id="region-filter", new_value=("West",))


def record_two_step_log(d: Dashboard) -> InteractionLog:
    """The canonical 2-event log: select East, then set the dropdown to West."""
    session = start_recording(d)
    session.record(east_selection())
    session.record(west_widget_change())
    return stop_recording(session)


def make_two_step_tour(
    d: Dashboard,
    goal: CommunicationGoal = CommunicationGoal.INTERACTION_GUIDE,
    instruction: str | None = None,
    title: str | None = None,
    tour_id: str = "tour-two-step",
) -> Tour:
    log = record_two_step_log(d)
    meta = TourMetadata(goal=goal, instruction=instruction, title=title)
    return create_tour(log, meta, tour_id=tour_id)


def tour_reply(step_count: int, tour_title: str = "Generated Tour") -> str:
    steps = [
        {"title": f"Generated step {i + 1}",
         "description": f"Generated description {i + 1}."}
        for i in range(step_count)
    ]
    return json.dumps({"title": tour_title, "steps": steps})


def step_reply(title: str = "Rewritten step",
               description: str = "Rewritten description.") -> str:
    return json.dumps({"title": title, "description": description})


def write_replies(directory: Path, replies: list[str]) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for i, reply in enumerate(replies):
        (directory / f"reply-{i:03d}.txt").write_text(reply, encoding="utf-8")
    return directory
