"""Exception types shared by the engine, the HTTP service, and the CLI.

Every error carries a machine-readable ``code`` so the service can mirror
engine errors into structured HTTP error bodies without string matching.
"""
from __future__ import annotations

from typing import Any


class TourForgeError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, *, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.details = details or {}

    @property
    def message(self) -> str:
        return str(self)

    def to_payload(self) -> dict[str, Any]:
        return {"code": self.code, "message": str(self), "details": self.details}


class SpecSyntaxError(TourForgeError):
    """Malformed document: bad JSON, missing keys, wrong value types."""

    code = "syntax_error"


class UnknownReferenceError(TourForgeError):
    """A spec or operation names a dataset, field, or zone that does not exist."""

    code = "unknown_reference"


class InvariantError(TourForgeError):
    """A structurally well-formed document violates a model invariant."""

    code = "invariant_violation"


class ZoneKindError(TourForgeError):
    """An operation was addressed to a zone of the wrong kind."""

    code = "zone_kind_mismatch"


class EventValidationError(TourForgeError):
    """An interaction event is invalid against the dashboard."""

    code = "invalid_event"


class UnknownIdError(TourForgeError):
    """Store lookup for a tour, dashboard, session, or step id failed."""

    code = "unknown_id"


class PositionError(TourForgeError):
    code = "position_out_of_range"


class StateMismatchError(TourForgeError):
    """An interaction log was recorded against a different state than expected."""

    code = "state_mismatch"


class RevisionConflictError(TourForgeError):
    code = "revision_conflict"


class StaleTourError(TourForgeError):
    """Playback or export requested on a tour with stale steps."""

    code = "stale_tour"


class PlaybackRangeError(TourForgeError):
    code = "playback_range"

    def __init__(self, message: str, *, code: str | None = None,
                 details: dict[str, Any] | None = None):
        super().__init__(message, details=details)
        if code:
            self.code = code


class GenerationBusyError(TourForgeError):
    code = "generation_busy"


class BackendTransportError(TourForgeError):
    """The generation backend could not be reached or replied with an error."""

    code = "backend_transport"


class BackendTimeoutError(BackendTransportError):
    code = "backend_timeout"


class ResponseFormatError(TourForgeError):
    """A generation reply could not be parsed into the expected structure."""

    code = "bad_generation_response"


class GenerationFailedError(TourForgeError):
    """All generation attempts were exhausted without a valid reply."""

    code = "generation_failed"
