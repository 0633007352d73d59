"""tourforge: interaction-first authoring engine for guided dashboard tours.

Authors record interactions on a declaratively specified dashboard; the
engine compiles them into tour steps, generates step content (LLM-backed or
deterministic templates), supports per-step editing and regeneration, and
plays tours back as overlays anchored to the interacted components.
"""
from .dashboard import (
    Dashboard,
    DashboardState,
    Predicate,
    PredicateOp,
    aggregate_view,
    parse_dashboard,
    serialize_dashboard,
    summarize_metadata,
    visible_rows,
)
from .errors import TourForgeError
from .events import (
    Brush,
    ClearSelection,
    CoordinatedViewChange,
    InteractionLog,
    MarkSelection,
    RecordingSession,
    WidgetChange,
    apply_event,
    parse_interaction_log,
    record_event,
    serialize_interaction_log,
    start_recording,
    stop_recording,
)
from .generation import MockChat, RemoteChat, generate_tour, regenerate_step
from .playback import (
    PlaybackFrame,
    PlaybackSession,
    default_anchor,
    export_playback_trace,
    goto_step,
    next_step,
    prev_step,
    start_playback,
)
from .prompts import (
    build_context_prompt,
    build_step_prompt,
    build_tour_prompt,
    goal_definition,
)
from .store import FileStore
from .templates import render_placeholders, template_generate
from .tours import (
    CommunicationGoal,
    ContentOrigin,
    Tour,
    TourMetadata,
    TourStep,
    create_tour,
    delete_step,
    edit_step_content,
    insert_interactive_steps,
    insert_standalone_step,
    parse_tour,
    serialize_tour,
    set_tour_metadata,
)

__version__ = "0.1.0"
