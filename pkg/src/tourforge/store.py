"""File-backed store: one canonical JSON document per dashboard and per tour.

Desk-scale by design (diffable fixtures, no database); writes are serialized
per process with a single lock, reads go straight to disk.
"""
from __future__ import annotations

import threading
from pathlib import Path

from .canonical import canonical_json
from .dashboard import Dashboard, dashboard_to_dict, parse_dashboard
from .errors import RevisionConflictError, UnknownIdError
from .tours import Tour, parse_tour, tour_to_dict


class FileStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "dashboards").mkdir(parents=True, exist_ok=True)
        (self.root / "tours").mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _dashboard_path(self, dashboard_id: str) -> Path:
        return self.root / "dashboards" / f"{dashboard_id}.json"

    def _tour_path(self, tour_id: str) -> Path:
        return self.root / "tours" / f"{tour_id}.json"

    # -- dashboards --------------------------------------------------------

    def save_dashboard(self, d: Dashboard) -> None:
        with self._write_lock:
            self._dashboard_path(d.id).write_text(
                canonical_json(dashboard_to_dict(d)), encoding="utf-8"
            )

    def load_dashboard(self, dashboard_id: str) -> Dashboard:
        path = self._dashboard_path(dashboard_id)
        if not path.exists():
            raise UnknownIdError(
                f"unknown dashboard '{dashboard_id}'",
                details={"dashboard": dashboard_id},
            )
        return parse_dashboard(path.read_text(encoding="utf-8"))

    def list_dashboards(self) -> list[Dashboard]:
        out = []
        for path in sorted((self.root / "dashboards").glob("*.json")):
            out.append(parse_dashboard(path.read_text(encoding="utf-8")))
        return out

    # -- tours ---------------------------------------------------------------

    def save_tour(self, t: Tour) -> None:
        """Last-write-wins keyed by id; a stale revision is a conflict."""
        with self._write_lock:
            path = self._tour_path(t.id)
            if path.exists():
                existing = parse_tour(path.read_text(encoding="utf-8"))
                if t.revision <= existing.revision:
                    raise RevisionConflictError(
                        f"tour '{t.id}' revision {t.revision} is stale "
                        f"(stored revision {existing.revision})",
                        details={"tour": t.id, "stored": existing.revision,
                                 "offered": t.revision},
                    )
            path.write_text(canonical_json(tour_to_dict(t)), encoding="utf-8")

    def load_tour(self, tour_id: str) -> Tour:
        path = self._tour_path(tour_id)
        if not path.exists():
            raise UnknownIdError(f"unknown tour '{tour_id}'", details={"tour": tour_id})
        return parse_tour(path.read_text(encoding="utf-8"))

    def delete_tour(self, tour_id: str) -> None:
        with self._write_lock:
            path = self._tour_path(tour_id)
            if not path.exists():
                raise UnknownIdError(f"unknown tour '{tour_id}'", details={"tour": tour_id})
            path.unlink()

    def list_tours(self, dashboard_id: str) -> list[Tour]:
        tours = []
        for path in (self.root / "tours").glob("*.json"):
            tour = parse_tour(path.read_text(encoding="utf-8"))
            if tour.dashboard_id == dashboard_id:
                tours.append(tour)
        tours.sort(key=lambda t: (t.metadata.title or "", t.id))
        return tours
