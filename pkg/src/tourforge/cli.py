"""Headless command line: validate specs, compile tours, generate content,
trace playback, and run the service. Exit codes: 0 success, 1 domain error,
2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .canonical import canonical_json
from .dashboard import ChartZone, Dashboard, TextZone, WidgetZone, parse_dashboard
from .errors import TourForgeError
from .events import parse_interaction_log
from .generation import MockChat, RemoteChat, generate_tour, regenerate_step
from .playback import export_playback_trace, frame_at, frame_to_dict
from .service import load_config, run
from .templates import template_generate
from .tours import (
    CommunicationGoal,
    Tour,
    create_tour,
    edit_step_content,
    insert_standalone_step,
    parse_tour,
    serialize_tour,
    set_step_goal,
    set_step_overlay_offset,
)

GOAL_NAMES = {
    "semantics": CommunicationGoal.DASHBOARD_SEMANTICS,
    "interaction": CommunicationGoal.INTERACTION_GUIDE,
    "facts": CommunicationGoal.DATA_FACTS,
}


def _number(text: str) -> float | int:
    # keep integral offsets as ints so serialized tours match API-written ones
    value = float(text)
    return int(value) if value.is_integer() else value


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_dashboard(path: str) -> Dashboard:
    return parse_dashboard(_read(path))


def _load_tour(path: str) -> Tour:
    return parse_tour(_read(path))


def _write_tour(path: str, tour: Tour) -> None:
    Path(path).write_text(serialize_tour(tour), encoding="utf-8")


def _summary(d: Dashboard) -> str:
    charts = sum(1 for z in d.zones if isinstance(z, ChartZone))
    widgets = sum(1 for z in d.zones if isinstance(z, WidgetZone))
    texts = sum(1 for z in d.zones if isinstance(z, TextZone))
    return (f"{d.id}: {len(d.zones)} zones ({charts} charts, {widgets} widgets, "
            f"{texts} text), {len(d.datasets)} datasets, {len(d.actions)} actions")


def cmd_validate(args: argparse.Namespace) -> int:
    dashboard = _load_dashboard(args.spec)
    print(_summary(dashboard))
    return 0


def cmd_tour_create(args: argparse.Namespace) -> int:
    from .tours import TourMetadata

    dashboard = _load_dashboard(args.spec)
    log = parse_interaction_log(_read(args.trace))
    if log.dashboard_id != dashboard.id:
        raise TourForgeError(
            f"trace was recorded on dashboard '{log.dashboard_id}', "
            f"not '{dashboard.id}'"
        )
    meta = TourMetadata(goal=GOAL_NAMES[args.goal],
                        instruction=args.instruction, title=args.title)
    tour = create_tour(log, meta, tour_id=args.id)
    _write_tour(args.output, tour)
    print(f"wrote {args.output}: {len(tour.steps)} steps")
    return 0


def _make_backend(args: argparse.Namespace):
    if args.mock:
        return MockChat.from_dir(args.mock)
    config = load_config(None)
    if not (config.llm_url and config.llm_model):
        raise TourForgeError(
            "remote generation needs TOURFORGE_LLM_URL and TOURFORGE_LLM_MODEL "
            "(or use --template / --mock)"
        )
    return RemoteChat(endpoint=config.llm_url, model=config.llm_model,
                      auth_token=config.llm_key, timeout=config.llm_timeout)


def cmd_tour_generate(args: argparse.Namespace) -> int:
    dashboard = _load_dashboard(args.spec)
    tour = _load_tour(args.tour)
    if args.template:
        tour = template_generate(tour, dashboard, only_step=args.step)
    else:
        backend = _make_backend(args)
        if args.step is not None:
            if not 0 <= args.step < len(tour.steps):
                raise TourForgeError(f"tour has no step {args.step}")
            tour = regenerate_step(tour, dashboard, tour.steps[args.step].id, backend)
        else:
            tour = generate_tour(tour, dashboard, backend)
    _write_tour(args.tour, tour)
    target = "all steps" if args.step is None else f"step {args.step}"
    print(f"generated {target} of {args.tour}")
    return 0


def cmd_tour_play(args: argparse.Namespace) -> int:
    dashboard = _load_dashboard(args.spec)
    tour = _load_tour(args.tour)
    if args.step is not None:
        frames = [frame_to_dict(frame_at(dashboard, tour, args.step))]
    else:
        frames = export_playback_trace(dashboard, tour)
    if args.trace_out:
        Path(args.trace_out).write_text(canonical_json(frames), encoding="utf-8")
        print(f"wrote {args.trace_out}: {len(frames)} frames")
        return 0
    for f in frames:
        anchor = f["anchor"]
        print(f"[{f['index']}] {f['title']} @ ({anchor['x']}, {anchor['y']})")
        print(f"    {f['description']}")
    return 0


def cmd_tour_edit(args: argparse.Namespace) -> int:
    tour = _load_tour(args.tour)
    if args.insert_standalone is not None:
        if not args.instruction:
            raise TourForgeError("--insert-standalone needs --instruction")
        tour = insert_standalone_step(tour, args.insert_standalone, args.instruction)
    else:
        if args.step is None:
            raise TourForgeError("tour edit needs --step K or --insert-standalone POS")
        if not 0 <= args.step < len(tour.steps):
            raise TourForgeError(f"tour has no step {args.step}")
        step_id = tour.steps[args.step].id
        if args.title is not None or args.description is not None:
            tour = edit_step_content(tour, step_id, args.title, args.description)
        if args.goal is not None:
            tour = set_step_goal(tour, step_id, GOAL_NAMES[args.goal], args.instruction)
        if args.offset is not None:
            tour = set_step_overlay_offset(tour, step_id, tuple(args.offset))
    _write_tour(args.tour, tour)
    print(f"updated {args.tour} (revision {tour.revision})")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    run(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tourforge",
        description="Author, generate, and play guided dashboard tours.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a dashboard spec file")
    p_validate.add_argument("spec")
    p_validate.set_defaults(func=cmd_validate)

    p_tour = sub.add_parser("tour", help="tour operations")
    tour_sub = p_tour.add_subparsers(dest="tour_command", required=True)

    p_create = tour_sub.add_parser("create", help="compile an interaction trace into a tour")
    p_create.add_argument("spec")
    p_create.add_argument("--trace", required=True, help="interaction log file")
    p_create.add_argument("--goal", required=True, choices=sorted(GOAL_NAMES))
    p_create.add_argument("--instruction")
    p_create.add_argument("--title")
    p_create.add_argument("--id", help="explicit tour id (default: random)")
    p_create.add_argument("-o", "--output", required=True)
    p_create.set_defaults(func=cmd_tour_create)

    p_generate = tour_sub.add_parser("generate", help="fill step content in place")
    p_generate.add_argument("tour")
    p_generate.add_argument("spec")
    mode = p_generate.add_mutually_exclusive_group()
    mode.add_argument("--template", action="store_true",
                      help="deterministic template content (no backend)")
    mode.add_argument("--mock", metavar="FIXTURES_DIR",
                      help="mock backend reading canned replies")
    p_generate.add_argument("--step", type=int, help="regenerate only this step index")
    p_generate.set_defaults(func=cmd_tour_generate)

    p_play = tour_sub.add_parser("play", help="print or export playback frames")
    p_play.add_argument("tour")
    p_play.add_argument("spec")
    p_play.add_argument("--step", type=int)
    p_play.add_argument("--trace-out", metavar="FILE")
    p_play.set_defaults(func=cmd_tour_play)

    p_edit = tour_sub.add_parser("edit", help="edit step content or settings in place")
    p_edit.add_argument("tour")
    p_edit.add_argument("--step", type=int)
    p_edit.add_argument("--title")
    p_edit.add_argument("--description")
    p_edit.add_argument("--goal", choices=sorted(GOAL_NAMES))
    p_edit.add_argument("--instruction")
    p_edit.add_argument("--offset", nargs=2, type=_number, metavar=("DX", "DY"))
    p_edit.add_argument("--insert-standalone", type=int, metavar="POS")
    p_edit.set_defaults(func=cmd_tour_edit)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", help="JSON config file (env vars override)")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TourForgeError as e:
        print(str(e), file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(str(e), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
