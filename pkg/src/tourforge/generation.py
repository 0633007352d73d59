"""Generation backends, structured-reply parsing, and tour/step generation.

The backend abstraction maps (system prompt, user prompt) to raw reply text.
Parsing tolerates prose and code fences around the reply's JSON object;
strictness lives in validation. A generate call invokes the backend at most
three times, appending a correction directive after each unusable reply.
"""
from __future__ import annotations

import ast
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Protocol

import httpx

from .dashboard import Dashboard, summarize_metadata
from .errors import (
    BackendTimeoutError,
    BackendTransportError,
    GenerationFailedError,
    ResponseFormatError,
)
from .prompts import (
    STEP_CORRECTION_DIRECTIVE,
    TOUR_CORRECTION_DIRECTIVE,
    build_context_prompt,
    build_step_prompt,
    build_tour_prompt,
)
from .tours import ContentOrigin, Tour, TourMetadata, with_step

MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class GeneratedContent:
    tour_title: str | None
    per_step: tuple[tuple[str, str], ...]  # (title, description) per step


class GenerationBackend(Protocol):
    def complete(self, system: str, user: str) -> str:
        """Return the raw reply text for one chat exchange."""
        ...


class MockChat:
    """Canned-reply backend for tests and offline use.

    Replies come from an in-memory list or from the sorted files of a fixture
    directory; once exhausted, the last reply repeats.
    """

    def __init__(self, replies: list[str]):
        if not replies:
            raise BackendTransportError("mock backend has no canned replies")
        self.replies = list(replies)
        self.calls = 0

    @classmethod
    def from_dir(cls, fixtures_dir: str | Path) -> "MockChat":
        paths = sorted(p for p in Path(fixtures_dir).iterdir() if p.is_file())
        if not paths:
            raise BackendTransportError(f"no reply fixtures in {fixtures_dir}")
        return cls([p.read_text(encoding="utf-8") for p in paths])

    def complete(self, system: str, user: str) -> str:
        reply = self.replies[min(self.calls, len(self.replies) - 1)]
        self.calls += 1
        return reply


class RemoteChat:
    """Chat-completion HTTP backend: POST {model, messages}, read the first choice."""

    def __init__(self, endpoint: str, model: str,
                 auth_token: str | None = None, timeout: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.auth_token = auth_token
        self.timeout = timeout

    def complete(self, system: str, user: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": 0,
        }
        try:
            response = httpx.post(self.endpoint, json=body, headers=headers,
                                   timeout=self.timeout)
        except httpx.TimeoutException as e:
            raise BackendTimeoutError(f"generation backend timed out: {e}") from e
        except httpx.HTTPError as e:
            raise BackendTransportError(f"generation backend unreachable: {e}") from e
        if response.status_code != 200:
            raise BackendTransportError(
                f"generation backend returned HTTP {response.status_code}",
                details={"status": response.status_code},
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise BackendTransportError(f"malformed backend response: {e}") from e


# ---------------------------------------------------------------------------
# Reply parsing
# ---------------------------------------------------------------------------

def _strip_code_fences(raw: str) -> str:
    lines = []
    for line in raw.splitlines():
        if line.lstrip().startswith("```"):
            continue
        lines.append(line)
    return "\n".join(lines)


def _balanced_objects(raw: str):
    """Yield every top-level {...} slice of the text, first to last."""
    depth = 0
    start = -1
    in_string: str | None = None
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == in_string:
                in_string = None
            continue
        if ch in "\"'":
            in_string = ch
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    yield raw[start:i + 1]


def extract_first_object(raw: str) -> dict[str, Any]:
    """Pull the first structured object out of a chat reply.

    Tolerates surrounding prose and code fences, and accepts single-quoted
    (Python-literal) objects as well as strict JSON.
    """
    text = _strip_code_fences(raw)
    for candidate in _balanced_objects(text):
        for loader in (json.loads, ast.literal_eval):
            try:
                obj = loader(candidate)
            except (ValueError, SyntaxError):
                continue
            if isinstance(obj, dict):
                return obj
    raise ResponseFormatError("reply contains no parseable object")


def _step_items(raw_steps: Any) -> list[Any]:
    if isinstance(raw_steps, list):
        return raw_steps
    if isinstance(raw_steps, dict):
        # some backends key steps by index; recover order from the keys
        return [raw_steps[k] for k in sorted(raw_steps, key=str)]
    raise ResponseFormatError("reply key 'steps' is neither a list nor an object")


def _title_description(item: Any, where: str) -> tuple[str, str]:
    if not isinstance(item, dict):
        raise ResponseFormatError(f"{where}: expected an object")
    title = item.get("title")
    description = item.get("description")
    if not isinstance(title, str) or not title.strip():
        raise ResponseFormatError(f"{where}: missing non-empty 'title'")
    if not isinstance(description, str) or not description.strip():
        raise ResponseFormatError(f"{where}: missing non-empty 'description'")
    return title, description


def parse_generation_response(raw: str, expected_steps: int) -> GeneratedContent:
    """Validate a whole-tour reply: a title plus one entry per requested step."""
    obj = extract_first_object(raw)
    if "steps" not in obj:
        raise ResponseFormatError("reply object has no 'steps' key")
    items = _step_items(obj["steps"])
    if len(items) != expected_steps:
        raise ResponseFormatError(
            f"step count mismatch: expected {expected_steps}, got {len(items)}",
            details={"expected": expected_steps, "got": len(items)},
        )
    per_step = tuple(
        _title_description(item, f"steps[{i}]") for i, item in enumerate(items)
    )
    tour_title = obj.get("title")
    if not isinstance(tour_title, str) or not tour_title.strip():
        tour_title = None
    return GeneratedContent(tour_title=tour_title, per_step=per_step)


def parse_step_response(raw: str) -> tuple[str, str]:
    """Validate a single-step reply: one {title, description} object."""
    obj = extract_first_object(raw)
    if "title" in obj and "description" in obj:
        return _title_description(obj, "step reply")
    if "steps" in obj:
        items = _step_items(obj["steps"])
        if len(items) == 1:
            return _title_description(items[0], "step reply")
    raise ResponseFormatError("reply is not a single {title, description} object")


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def generate_tour(t: Tour, d: Dashboard, backend: GenerationBackend) -> Tour:
    """Fill every step's title/description from the backend.

    The author's tour title is never overwritten; a backend-proposed title is
    used only when the author left it absent. Parse failures retry with a
    correction directive, up to three attempts total; on exhaustion the
    original tour is left untouched and an error is raised.
    """
    system = build_context_prompt(summarize_metadata(d)).content
    user = build_tour_prompt(t, d).content
    correction = TOUR_CORRECTION_DIRECTIVE.replace("{count}", str(len(t.steps)))

    last_error: ResponseFormatError | None = None
    for attempt in range(MAX_ATTEMPTS):
        prompt = user if attempt == 0 else user + correction
        raw = backend.complete(system, prompt)
        try:
            content = parse_generation_response(raw, expected_steps=len(t.steps))
        except ResponseFormatError as e:
            last_error = e
            continue
        steps = tuple(
            replace(step, title=title, description=description,
                    content_origin=ContentOrigin.GENERATED)
            for step, (title, description) in zip(t.steps, content.per_step)
        )
        metadata = t.metadata
        if metadata.title is None and content.tour_title:
            metadata = TourMetadata(goal=metadata.goal,
                                    instruction=metadata.instruction,
                                    title=content.tour_title)
        return replace(t, steps=steps, metadata=metadata, revision=t.revision + 1)

    raise GenerationFailedError(
        f"no usable reply after {MAX_ATTEMPTS} attempts: {last_error}",
        details={"attempts": MAX_ATTEMPTS,
                 "lastError": last_error.to_payload() if last_error else None},
    )


def regenerate_step(
    t: Tour,
    d: Dashboard,
    step_id: str,
    backend: GenerationBackend,
    extra_instruction: str | None = None,
) -> Tour:
    """Regenerate one step under its effective goal; all other steps are untouched."""
    index = t.step_index(step_id)
    step = t.steps[index]
    effective_goal = step.goal_override or t.metadata.goal
    instruction = extra_instruction if extra_instruction is not None else step.step_instruction
    system = build_context_prompt(summarize_metadata(d)).content
    user = build_step_prompt(t, d, index, effective_goal, instruction).content

    last_error: ResponseFormatError | None = None
    for attempt in range(MAX_ATTEMPTS):
        prompt = user if attempt == 0 else user + STEP_CORRECTION_DIRECTIVE
        raw = backend.complete(system, prompt)
        try:
            title, description = parse_step_response(raw)
        except ResponseFormatError as e:
            last_error = e
            continue
        new_step = replace(step, title=title, description=description,
                           content_origin=ContentOrigin.GENERATED)
        updated = with_step(t, index, new_step)
        return replace(updated, revision=t.revision + 1)

    raise GenerationFailedError(
        f"no usable reply after {MAX_ATTEMPTS} attempts: {last_error}",
        details={"attempts": MAX_ATTEMPTS,
                 "lastError": last_error.to_payload() if last_error else None},
    )
