"""Stable digests of dashboard states for trace diffing and splice checks."""
from __future__ import annotations

import hashlib
import json

from .dashboard import DashboardState


def _sorted_map(zone_map) -> dict:
    return {
        zone: sorted(
            ([p.field, p.op.value, list(p.values)] for p in preds),
            key=lambda item: json.dumps(item, ensure_ascii=False),
        )
        for zone, preds in sorted(zone_map.items())
    }


def state_digest(s: DashboardState) -> str:
    """Order-insensitive sha256 over the state's sorted predicates."""
    doc = {
        "perZonePredicates": _sorted_map(s.predicates),
        "perZoneHighlights": _sorted_map(s.highlights),
    }
    blob = json.dumps(doc, ensure_ascii=False, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
