"""Deterministic tour playback: per-step state, overlay anchors, trace export.

Every frame is recomputed by folding the tour's interactive events from its
start state (reset + fold), which keeps `goto` pure and makes backward
navigation trivial: `prev` is just a `goto` at cursor - 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .dashboard import Dashboard, DashboardState
from .digest import state_digest
from .errors import PlaybackRangeError, StaleTourError
from .events import apply_event
from .templates import render_placeholders
from .tours import Tour, TourStep

# Nominal overlay box used only for clamping anchors inside the dashboard.
OVERLAY_W = 260
OVERLAY_H = 120
ANCHOR_GAP = 8


@dataclass(frozen=True)
class PlaybackFrame:
    step_index: int
    state: DashboardState
    title: str
    description: str
    anchor: tuple[float, float]
    target_zone_id: str | None


def _clamp_anchor(d: Dashboard, x: float, y: float) -> tuple[float, float]:
    x = max(0, min(x, d.width - OVERLAY_W))
    y = max(0, min(y, d.height - OVERLAY_H))
    return (x, y)


def default_anchor(d: Dashboard, step: TourStep) -> tuple[float, float]:
    """Overlay anchor near the interacted zone; dashboard center for standalone
    steps; always clamped so the nominal overlay box stays inside the bounds."""
    if step.is_interactive:
        bounds = d.zone(step.event.zone_id).bounds
        x = bounds.x + bounds.w + ANCHOR_GAP
        y = bounds.y + bounds.h + ANCHOR_GAP
    else:
        x = d.width / 2
        y = d.height / 2
    return _clamp_anchor(d, x, y)


def _check_not_stale(t: Tour) -> None:
    stale = t.stale_step_ids()
    if stale:
        raise StaleTourError(
            f"tour has stale steps: {', '.join(stale)}",
            details={"staleSteps": stale},
        )


def frame_at(d: Dashboard, t: Tour, k: int) -> PlaybackFrame:
    """Pure frame computation for step k (0-based)."""
    _check_not_stale(t)
    if not 0 <= k < len(t.steps):
        raise PlaybackRangeError(
            f"step index {k} out of range 0..{len(t.steps) - 1}",
            code="index_out_of_range",
            details={"index": k, "steps": len(t.steps)},
        )
    state = t.start_state
    for step in t.steps[:k + 1]:
        if step.is_interactive:
            state, _ = apply_event(d, state, step.event)
    step = t.steps[k]
    ax, ay = default_anchor(d, step)
    if step.overlay_offset is not None:
        ax, ay = _clamp_anchor(d, ax + step.overlay_offset[0],
                               ay + step.overlay_offset[1])
    return PlaybackFrame(
        step_index=k,
        state=state,
        title=step.title,
        description=render_placeholders(step.description, d, state),
        anchor=(ax, ay),
        target_zone_id=step.event.zone_id if step.is_interactive else None,
    )


class PlaybackSession:
    """Cursor over a tour; cursor -1 means 'before start'."""

    def __init__(self, dashboard: Dashboard, tour: Tour):
        self.dashboard = dashboard
        self.tour = tour
        self.cursor = -1


def start_playback(d: Dashboard, t: Tour) -> PlaybackSession:
    return PlaybackSession(d, t)


def goto_step(sess: PlaybackSession, k: int) -> PlaybackFrame:
    frame = frame_at(sess.dashboard, sess.tour, k)
    sess.cursor = k
    return frame


def next_step(sess: PlaybackSession) -> PlaybackFrame:
    if sess.cursor + 1 >= len(sess.tour.steps):
        raise PlaybackRangeError("already at the end of the tour", code="past_end")
    return goto_step(sess, sess.cursor + 1)


def prev_step(sess: PlaybackSession) -> PlaybackFrame:
    if sess.cursor - 1 < 0:
        raise PlaybackRangeError("already before the first step", code="before_start")
    return goto_step(sess, sess.cursor - 1)


def frame_to_dict(frame: PlaybackFrame) -> dict[str, Any]:
    return {
        "index": frame.step_index,
        "stateDigest": state_digest(frame.state),
        "anchor": {"x": frame.anchor[0], "y": frame.anchor[1]},
        "targetZoneId": frame.target_zone_id,
        "title": frame.title,
        "description": frame.description,
    }


def export_playback_trace(d: Dashboard, t: Tour) -> list[dict[str, Any]]:
    """Ordered frame records for headless diffing; deterministic by construction."""
    _check_not_stale(t)
    return [frame_to_dict(frame_at(d, t, k)) for k in range(len(t.steps))]
