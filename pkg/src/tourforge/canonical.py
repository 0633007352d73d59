"""Canonical JSON layout used for every serialized artifact.

Documents built from the same values must serialize to identical bytes, so
file round-trips, golden snapshots, and CLI-vs-service comparisons can use
plain equality.
"""
from __future__ import annotations

import json
from typing import Any


def canonical_json(doc: Any) -> str:
    """Serialize with a fixed, human-diffable layout (keys stay in insertion order)."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def compact_json(doc: Any) -> str:
    """Single-line form used when splicing documents into prompt text."""
    return json.dumps(doc, ensure_ascii=False)
