"""Declarative dashboard model: parsing, validation, and view computation.

A dashboard document is the engine's world model: zones (charts, widgets,
text, images), inline datasets, and cross-view actions that say how an
interaction on one zone affects the others. Raw data travels inside the
document on purpose, so every downstream computation is deterministic and
testable without a live connection.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Mapping

from .canonical import canonical_json
from .errors import (
    InvariantError,
    SpecSyntaxError,
    UnknownReferenceError,
    ZoneKindError,
)


class ChartKind(str, Enum):
    BAR = "bar"
    SCATTER = "scatter"
    LINE = "line"


class Channel(str, Enum):
    X = "x"
    Y = "y"
    COLOR = "color"


class Aggregate(str, Enum):
    NONE = "none"
    SUM = "sum"
    AVG = "avg"
    COUNT = "count"


class WidgetKind(str, Enum):
    BUTTON = "button"
    DROPDOWN = "dropdown"
    CHECKBOX = "checkbox"
    RADIO = "radio"


class Trigger(str, Enum):
    SELECT = "select"
    BRUSH = "brush"
    WIDGET_CHANGE = "widgetChange"


class Behavior(str, Enum):
    FILTER = "filter"
    HIGHLIGHT = "highlight"


class PredicateOp(str, Enum):
    EQUALS = "equals"
    IN = "in"
    RANGE = "range"


# Dropdowns and radios treat this option value as "clear my filter".
ALL_SENTINEL = "All"


@dataclass(frozen=True)
class Bounds:
    """Zone rectangle in abstract dashboard pixels, origin top-left."""

    x: float
    y: float
    w: float
    h: float


@dataclass(frozen=True)
class Encoding:
    channel: Channel
    field: str
    aggregate: Aggregate = Aggregate.NONE


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # "string" | "number"


@dataclass(frozen=True)
class Dataset:
    name: str
    columns: tuple[Column, ...]
    rows: tuple[tuple[Any, ...], ...]

    def column_index(self, name: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name == name:
                return i
        raise UnknownReferenceError(
            f"dataset '{self.name}' has no column '{name}'",
            details={"dataset": self.name, "field": name},
        )

    def has_column(self, name: str) -> bool:
        return any(col.name == name for col in self.columns)


@dataclass(frozen=True)
class ChartZone:
    id: str
    bounds: Bounds
    worksheet_name: str
    chart_kind: ChartKind
    dataset: str
    encodings: tuple[Encoding, ...]

    @property
    def display_name(self) -> str:
        return self.worksheet_name or self.id

    def encoding(self, channel: Channel) -> Encoding | None:
        for enc in self.encodings:
            if enc.channel == channel:
                return enc
        return None


@dataclass(frozen=True)
class WidgetZone:
    id: str
    bounds: Bounds
    widget_kind: WidgetKind
    target_field: str
    dataset: str
    options: tuple[str, ...]
    label: str

    @property
    def display_name(self) -> str:
        return self.label or self.id


@dataclass(frozen=True)
class TextZone:
    id: str
    bounds: Bounds
    content: str

    @property
    def display_name(self) -> str:
        return self.id


@dataclass(frozen=True)
class ImageZone:
    id: str
    bounds: Bounds
    alt_text: str

    @property
    def display_name(self) -> str:
        return self.id


Zone = ChartZone | WidgetZone | TextZone | ImageZone


@dataclass(frozen=True)
class CrossViewAction:
    id: str
    source_zone: str
    target_zones: tuple[str, ...]
    trigger: Trigger
    behavior: Behavior
    carried_fields: tuple[str, ...]


@dataclass(frozen=True)
class Predicate:
    """A single filter/highlight condition on one field."""

    field: str
    op: PredicateOp
    values: tuple[Any, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if self.op == PredicateOp.EQUALS and len(self.values) != 1:
            raise InvariantError("equals predicate must carry exactly 1 value")
        if self.op == PredicateOp.RANGE:
            if len(self.values) != 2:
                raise InvariantError("range predicate must carry exactly [lo, hi]")
            lo, hi = self.values
            try:
                ordered = lo <= hi
            except TypeError:
                raise InvariantError("range predicate bounds are not comparable")
            if not ordered:
                raise InvariantError(f"range predicate needs lo <= hi, got [{lo}, {hi}]")

    def matches(self, value: Any) -> bool:
        if self.op == PredicateOp.EQUALS:
            return value == self.values[0]
        if self.op == PredicateOp.IN:
            return value in self.values
        lo, hi = self.values
        try:
            return lo <= value <= hi
        except TypeError:
            return False


def _normalize_zone_map(
    raw: Mapping[str, tuple[Predicate, ...]] | None,
) -> dict[str, tuple[Predicate, ...]]:
    out: dict[str, tuple[Predicate, ...]] = {}
    for zone_id, preds in (raw or {}).items():
        preds = tuple(preds)
        if preds:
            out[zone_id] = preds
    return out


@dataclass(frozen=True)
class DashboardState:
    """Per-zone filter and highlight predicates; empty maps mean the initial state."""

    predicates: Mapping[str, tuple[Predicate, ...]] = field(default_factory=dict)
    highlights: Mapping[str, tuple[Predicate, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicates", _normalize_zone_map(self.predicates))
        object.__setattr__(self, "highlights", _normalize_zone_map(self.highlights))

    @staticmethod
    def initial() -> "DashboardState":
        return DashboardState()

    @property
    def is_initial(self) -> bool:
        return not self.predicates and not self.highlights

    def zone_filters(self, zone_id: str) -> tuple[Predicate, ...]:
        return self.predicates.get(zone_id, ())

    def zone_highlights(self, zone_id: str) -> tuple[Predicate, ...]:
        return self.highlights.get(zone_id, ())


@dataclass(frozen=True)
class Dashboard:
    id: str
    title: str
    size: tuple[float, float]  # (width, height)
    zones: tuple[Zone, ...]
    datasets: tuple[Dataset, ...]
    actions: tuple[CrossViewAction, ...]

    @property
    def width(self) -> float:
        return self.size[0]

    @property
    def height(self) -> float:
        return self.size[1]

    def zone(self, zone_id: str) -> Zone:
        for z in self.zones:
            if z.id == zone_id:
                return z
        raise UnknownReferenceError(
            f"unknown zone '{zone_id}'", details={"zone": zone_id}
        )

    def zone_index(self, zone_id: str) -> int:
        for i, z in enumerate(self.zones):
            if z.id == zone_id:
                return i
        raise UnknownReferenceError(
            f"unknown zone '{zone_id}'", details={"zone": zone_id}
        )

    def find_zone_by_name(self, name: str) -> Zone | None:
        """Resolve a zone by display name (worksheet name, widget label, or id)."""
        for z in self.zones:
            if z.display_name == name:
                return z
        for z in self.zones:
            if z.id == name:
                return z
        return None

    def dataset(self, name: str) -> Dataset:
        for ds in self.datasets:
            if ds.name == name:
                return ds
        raise UnknownReferenceError(
            f"unknown dataset '{name}'", details={"dataset": name}
        )

    def charts(self) -> Iterator[ChartZone]:
        return (z for z in self.zones if isinstance(z, ChartZone))

    def widgets(self) -> Iterator[WidgetZone]:
        return (z for z in self.zones if isinstance(z, WidgetZone))

    def actions_from(self, zone_id: str, trigger: Trigger) -> list[CrossViewAction]:
        return [a for a in self.actions
                if a.source_zone == zone_id and a.trigger == trigger]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _require(doc: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in doc:
        raise SpecSyntaxError(f"{path}: missing required key '{key}'")
    return doc[key]


def _require_str(doc: Mapping[str, Any], key: str, path: str) -> str:
    value = _require(doc, key, path)
    if not isinstance(value, str):
        raise SpecSyntaxError(f"{path}.{key}: expected string, got {type(value).__name__}")
    return value


def _require_list(doc: Mapping[str, Any], key: str, path: str) -> list:
    value = _require(doc, key, path)
    if not isinstance(value, list):
        raise SpecSyntaxError(f"{path}.{key}: expected array, got {type(value).__name__}")
    return value


def _require_number(doc: Mapping[str, Any], key: str, path: str) -> float:
    value = _require(doc, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecSyntaxError(f"{path}.{key}: expected number, got {type(value).__name__}")
    return value


def _enum(cls: type, value: Any, path: str):
    try:
        return cls(value)
    except ValueError:
        valid = ", ".join(m.value for m in cls)  # type: ignore[attr-defined]
        raise SpecSyntaxError(f"{path}: unknown value {value!r} (expected one of: {valid})")


def _parse_bounds(doc: Any, path: str) -> Bounds:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected bounds object {{x, y, w, h}}")
    return Bounds(
        x=_require_number(doc, "x", path),
        y=_require_number(doc, "y", path),
        w=_require_number(doc, "w", path),
        h=_require_number(doc, "h", path),
    )


def _parse_dataset(doc: Any, path: str) -> Dataset:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected dataset object")
    name = _require_str(doc, "name", path)
    columns = []
    for i, col in enumerate(_require_list(doc, "columns", path)):
        cpath = f"{path}.columns[{i}]"
        if not isinstance(col, dict):
            raise SpecSyntaxError(f"{cpath}: expected column object")
        kind = _require_str(col, "kind", cpath)
        if kind not in ("string", "number"):
            raise SpecSyntaxError(f"{cpath}.kind: expected 'string' or 'number', got {kind!r}")
        columns.append(Column(name=_require_str(col, "name", cpath), kind=kind))
    rows = []
    for i, row in enumerate(_require_list(doc, "rows", path)):
        rpath = f"{path}.rows[{i}]"
        if not isinstance(row, list):
            raise SpecSyntaxError(f"{rpath}: expected array")
        if len(row) != len(columns):
            raise InvariantError(
                f"{rpath}: row arity {len(row)} does not match column count {len(columns)}"
            )
        for j, (cell, col) in enumerate(zip(row, columns)):
            if col.kind == "string" and not isinstance(cell, str):
                raise InvariantError(f"{rpath}[{j}]: column '{col.name}' expects a string")
            if col.kind == "number" and (
                isinstance(cell, bool) or not isinstance(cell, (int, float))
            ):
                raise InvariantError(f"{rpath}[{j}]: column '{col.name}' expects a number")
        rows.append(tuple(row))
    return Dataset(name=name, columns=tuple(columns), rows=tuple(rows))


def _parse_zone(doc: Any, path: str) -> Zone:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected zone object")
    zone_id = _require_str(doc, "id", path)
    bounds = _parse_bounds(_require(doc, "bounds", path), f"{path}.bounds")
    zone_type = _require_str(doc, "type", path)
    if zone_type == "chart":
        encodings = []
        for i, enc in enumerate(_require_list(doc, "encodings", path)):
            epath = f"{path}.encodings[{i}]"
            if not isinstance(enc, dict):
                raise SpecSyntaxError(f"{epath}: expected encoding object")
            encodings.append(Encoding(
                channel=_enum(Channel, _require_str(enc, "channel", epath), f"{epath}.channel"),
                field=_require_str(enc, "field", epath),
                aggregate=_enum(Aggregate, enc.get("aggregate", "none"), f"{epath}.aggregate"),
            ))
        return ChartZone(
            id=zone_id,
            bounds=bounds,
            worksheet_name=_require_str(doc, "worksheetName", path),
            chart_kind=_enum(ChartKind, _require_str(doc, "chartKind", path), f"{path}.chartKind"),
            dataset=_require_str(doc, "dataset", path),
            encodings=tuple(encodings),
        )
    if zone_type == "widget":
        options = _require_list(doc, "options", path)
        for i, opt in enumerate(options):
            if not isinstance(opt, str):
                raise SpecSyntaxError(f"{path}.options[{i}]: expected string")
        return WidgetZone(
            id=zone_id,
            bounds=bounds,
            widget_kind=_enum(WidgetKind, _require_str(doc, "widgetKind", path), f"{path}.widgetKind"),
            target_field=_require_str(doc, "targetField", path),
            dataset=_require_str(doc, "dataset", path),
            options=tuple(options),
            label=_require_str(doc, "label", path),
        )
    if zone_type == "text":
        return TextZone(id=zone_id, bounds=bounds, content=_require_str(doc, "content", path))
    if zone_type == "image":
        return ImageZone(id=zone_id, bounds=bounds, alt_text=_require_str(doc, "altText", path))
    raise SpecSyntaxError(
        f"{path}.type: unknown zone type {zone_type!r} "
        "(expected one of: chart, widget, text, image)"
    )


def _parse_action(doc: Any, path: str) -> CrossViewAction:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected action object")
    targets = _require_list(doc, "targetZones", path)
    carried = _require_list(doc, "carriedFields", path)
    for i, t in enumerate(targets):
        if not isinstance(t, str):
            raise SpecSyntaxError(f"{path}.targetZones[{i}]: expected string")
    for i, f_ in enumerate(carried):
        if not isinstance(f_, str):
            raise SpecSyntaxError(f"{path}.carriedFields[{i}]: expected string")
    return CrossViewAction(
        id=_require_str(doc, "id", path),
        source_zone=_require_str(doc, "sourceZone", path),
        target_zones=tuple(targets),
        trigger=_enum(Trigger, _require_str(doc, "trigger", path), f"{path}.trigger"),
        behavior=_enum(Behavior, _require_str(doc, "behavior", path), f"{path}.behavior"),
        carried_fields=tuple(carried),
    )


def _zone_dataset_name(zone: Zone) -> str | None:
    if isinstance(zone, (ChartZone, WidgetZone)):
        return zone.dataset
    return None


def _validate(d: Dashboard) -> Dashboard:
    seen: set[str] = set()
    for z in d.zones:
        if z.id in seen:
            raise InvariantError(f"duplicate zone id '{z.id}'")
        seen.add(z.id)

    dataset_names = set()
    for ds in d.datasets:
        if ds.name in dataset_names:
            raise InvariantError(f"duplicate dataset name '{ds.name}'")
        dataset_names.add(ds.name)

    width, height = d.size
    if width <= 0 or height <= 0:
        raise InvariantError("dashboard size must be positive")

    for z in d.zones:
        b = z.bounds
        if b.w < 0 or b.h < 0:
            raise InvariantError(f"zone '{z.id}' has negative extent")
        if b.x < 0 or b.y < 0 or b.x + b.w > width or b.y + b.h > height:
            raise InvariantError(f"zone '{z.id}' bounds lie outside the dashboard size")

        if isinstance(z, ChartZone):
            if z.dataset not in dataset_names:
                raise UnknownReferenceError(
                    f"chart '{z.id}' references unknown dataset '{z.dataset}'",
                    details={"zone": z.id, "dataset": z.dataset},
                )
            ds = d.dataset(z.dataset)
            per_channel: dict[Channel, int] = {}
            for enc in z.encodings:
                per_channel[enc.channel] = per_channel.get(enc.channel, 0) + 1
                if not ds.has_column(enc.field):
                    raise UnknownReferenceError(
                        f"chart '{z.id}' encodes unknown field '{enc.field}'",
                        details={"zone": z.id, "field": enc.field},
                    )
            if per_channel.get(Channel.X, 0) != 1 or per_channel.get(Channel.Y, 0) != 1:
                raise InvariantError(f"chart '{z.id}' must have exactly one x and one y encoding")
            if per_channel.get(Channel.COLOR, 0) > 1:
                raise InvariantError(f"chart '{z.id}' has more than one color encoding")
        elif isinstance(z, WidgetZone):
            if z.dataset not in dataset_names:
                raise UnknownReferenceError(
                    f"widget '{z.id}' references unknown dataset '{z.dataset}'",
                    details={"zone": z.id, "dataset": z.dataset},
                )
            if not d.dataset(z.dataset).has_column(z.target_field):
                raise UnknownReferenceError(
                    f"widget '{z.id}' targets unknown field '{z.target_field}'",
                    details={"zone": z.id, "field": z.target_field},
                )
            if z.widget_kind in (WidgetKind.DROPDOWN, WidgetKind.CHECKBOX, WidgetKind.RADIO):
                if not z.options:
                    raise InvariantError(f"widget '{z.id}' ({z.widget_kind.value}) needs options")
            if z.widget_kind == WidgetKind.BUTTON and len(z.options) != 1:
                raise InvariantError(f"button '{z.id}' must carry exactly one fixed option")
        elif isinstance(z, TextZone):
            if not z.content:
                raise InvariantError(f"text zone '{z.id}' has empty content")

    zone_ids = {z.id for z in d.zones}
    for a in d.actions:
        if a.source_zone not in zone_ids:
            raise UnknownReferenceError(
                f"action '{a.id}' names unknown source zone '{a.source_zone}'",
                details={"action": a.id, "zone": a.source_zone},
            )
        source = d.zone(a.source_zone)
        source_dataset = _zone_dataset_name(source)
        if source_dataset is None:
            raise InvariantError(
                f"action '{a.id}' source zone '{a.source_zone}' carries no dataset"
            )
        ds = d.dataset(source_dataset)
        for f_ in a.carried_fields:
            if not ds.has_column(f_):
                raise UnknownReferenceError(
                    f"action '{a.id}' carries unknown field '{f_}'",
                    details={"action": a.id, "field": f_},
                )
        for t in a.target_zones:
            if t not in zone_ids:
                raise UnknownReferenceError(
                    f"action '{a.id}' targets unknown zone '{t}'",
                    details={"action": a.id, "zone": t},
                )
            if t == a.source_zone:
                raise InvariantError(f"action '{a.id}' targets its own source zone")
            if not isinstance(d.zone(t), ChartZone):
                raise InvariantError(f"action '{a.id}' target '{t}' is not a chart zone")
    return d


def dashboard_from_dict(doc: Any) -> Dashboard:
    if not isinstance(doc, dict):
        raise SpecSyntaxError("top level: expected one object")
    size_doc = _require(doc, "size", "dashboard")
    if not isinstance(size_doc, dict):
        raise SpecSyntaxError("dashboard.size: expected object {width, height}")
    d = Dashboard(
        id=_require_str(doc, "id", "dashboard"),
        title=_require_str(doc, "title", "dashboard"),
        size=(
            _require_number(size_doc, "width", "dashboard.size"),
            _require_number(size_doc, "height", "dashboard.size"),
        ),
        datasets=tuple(
            _parse_dataset(ds, f"datasets[{i}]")
            for i, ds in enumerate(_require_list(doc, "datasets", "dashboard"))
        ),
        zones=tuple(
            _parse_zone(z, f"zones[{i}]")
            for i, z in enumerate(_require_list(doc, "zones", "dashboard"))
        ),
        actions=tuple(
            _parse_action(a, f"actions[{i}]")
            for i, a in enumerate(_require_list(doc, "actions", "dashboard"))
        ),
    )
    return _validate(d)


def parse_dashboard(spec_text: str) -> Dashboard:
    """Parse and validate a dashboard spec document."""
    try:
        doc = json.loads(spec_text)
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(
            f"line {e.lineno}, column {e.colno}: {e.msg}",
            details={"line": e.lineno, "column": e.colno},
        ) from e
    return dashboard_from_dict(doc)


# ---------------------------------------------------------------------------
# Serialization (canonical key order mirrors the published schema)
# ---------------------------------------------------------------------------

def _bounds_to_dict(b: Bounds) -> dict[str, Any]:
    return {"x": b.x, "y": b.y, "w": b.w, "h": b.h}


def _zone_to_dict(z: Zone) -> dict[str, Any]:
    base: dict[str, Any] = {"id": z.id, "bounds": _bounds_to_dict(z.bounds)}
    if isinstance(z, ChartZone):
        base["type"] = "chart"
        base["worksheetName"] = z.worksheet_name
        base["chartKind"] = z.chart_kind.value
        base["dataset"] = z.dataset
        base["encodings"] = [
            {"channel": e.channel.value, "field": e.field, "aggregate": e.aggregate.value}
            for e in z.encodings
        ]
    elif isinstance(z, WidgetZone):
        base["type"] = "widget"
        base["widgetKind"] = z.widget_kind.value
        base["targetField"] = z.target_field
        base["dataset"] = z.dataset
        base["options"] = list(z.options)
        base["label"] = z.label
    elif isinstance(z, TextZone):
        base["type"] = "text"
        base["content"] = z.content
    else:
        base["type"] = "image"
        base["altText"] = z.alt_text
    return base


def dashboard_to_dict(d: Dashboard) -> dict[str, Any]:
    return {
        "id": d.id,
        "title": d.title,
        "size": {"width": d.width, "height": d.height},
        "datasets": [
            {
                "name": ds.name,
                "columns": [{"name": c.name, "kind": c.kind} for c in ds.columns],
                "rows": [list(row) for row in ds.rows],
            }
            for ds in d.datasets
        ],
        "zones": [_zone_to_dict(z) for z in d.zones],
        "actions": [
            {
                "id": a.id,
                "sourceZone": a.source_zone,
                "targetZones": list(a.target_zones),
                "trigger": a.trigger.value,
                "behavior": a.behavior.value,
                "carriedFields": list(a.carried_fields),
            }
            for a in d.actions
        ],
    }


def serialize_dashboard(d: Dashboard) -> str:
    return canonical_json(dashboard_to_dict(d))


def predicate_to_dict(p: Predicate) -> dict[str, Any]:
    return {"field": p.field, "op": p.op.value, "values": list(p.values)}


def predicate_from_dict(doc: Any, path: str = "predicate") -> Predicate:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected predicate object")
    return Predicate(
        field=_require_str(doc, "field", path),
        op=_enum(PredicateOp, _require_str(doc, "op", path), f"{path}.op"),
        values=tuple(_require_list(doc, "values", path)),
    )


def state_to_dict(s: DashboardState) -> dict[str, Any]:
    return {
        "perZonePredicates": {
            zone: [predicate_to_dict(p) for p in s.predicates[zone]]
            for zone in sorted(s.predicates)
        },
        "perZoneHighlights": {
            zone: [predicate_to_dict(p) for p in s.highlights[zone]]
            for zone in sorted(s.highlights)
        },
    }


def state_from_dict(doc: Any, path: str = "state") -> DashboardState:
    if not isinstance(doc, dict):
        raise SpecSyntaxError(f"{path}: expected state object")

    def read(key: str) -> dict[str, tuple[Predicate, ...]]:
        raw = doc.get(key, {})
        if not isinstance(raw, dict):
            raise SpecSyntaxError(f"{path}.{key}: expected object")
        out: dict[str, tuple[Predicate, ...]] = {}
        for zone, preds in raw.items():
            if not isinstance(preds, list):
                raise SpecSyntaxError(f"{path}.{key}.{zone}: expected array")
            out[zone] = tuple(
                predicate_from_dict(p, f"{path}.{key}.{zone}[{i}]")
                for i, p in enumerate(preds)
            )
        return out

    return DashboardState(predicates=read("perZonePredicates"),
                          highlights=read("perZoneHighlights"))


# ---------------------------------------------------------------------------
# View computation
# ---------------------------------------------------------------------------

def _chart_zone(d: Dashboard, zone_id: str) -> ChartZone:
    zone = d.zone(zone_id)
    if not isinstance(zone, ChartZone):
        raise ZoneKindError(
            f"zone '{zone_id}' is not a chart", details={"zone": zone_id}
        )
    return zone


def visible_rows(d: Dashboard, s: DashboardState, zone_id: str) -> list[int]:
    """Indices of the chart's dataset rows that satisfy every filter predicate."""
    zone = _chart_zone(d, zone_id)
    ds = d.dataset(zone.dataset)
    preds = s.zone_filters(zone_id)
    if not preds:
        return list(range(len(ds.rows)))
    cols = [(p, ds.column_index(p.field)) for p in preds]
    return [
        i for i, row in enumerate(ds.rows)
        if all(p.matches(row[ci]) for p, ci in cols)
    ]


def aggregate_view(
    d: Dashboard, s: DashboardState, zone_id: str
) -> list[tuple[Any, Any]]:
    """Group visible rows by the x field and aggregate the y field.

    Categories keep the first-appearance order of the full dataset; categories
    with no visible rows are omitted. A y aggregate of ``none`` falls back to
    ``sum`` so raw-valued charts still produce a well-defined roll-up.
    """
    zone = _chart_zone(d, zone_id)
    x_enc = zone.encoding(Channel.X)
    y_enc = zone.encoding(Channel.Y)
    assert x_enc is not None and y_enc is not None  # guaranteed by validation
    ds = d.dataset(zone.dataset)
    xi = ds.column_index(x_enc.field)
    yi = ds.column_index(y_enc.field)

    order: list[Any] = []
    seen: set[Any] = set()
    for row in ds.rows:
        if row[xi] not in seen:
            seen.add(row[xi])
            order.append(row[xi])

    groups: dict[Any, list[Any]] = {}
    for i in visible_rows(d, s, zone_id):
        groups.setdefault(ds.rows[i][xi], []).append(ds.rows[i][yi])

    agg = y_enc.aggregate
    out: list[tuple[Any, Any]] = []
    for cat in order:
        values = groups.get(cat)
        if not values:
            continue
        if agg == Aggregate.COUNT:
            out.append((cat, len(values)))
        elif agg == Aggregate.AVG:
            out.append((cat, sum(values) / len(values)))
        else:  # SUM, and NONE treated as sum
            out.append((cat, sum(values)))
    return out


# ---------------------------------------------------------------------------
# Metadata summary (context document for content generation)
# ---------------------------------------------------------------------------

def _encoding_label(enc: Encoding) -> str:
    if enc.aggregate == Aggregate.NONE:
        return f"{enc.channel.value}={enc.field}"
    return f"{enc.channel.value}={enc.aggregate.value}({enc.field})"


def chart_summary(zone: ChartZone) -> str:
    parts = ", ".join(_encoding_label(e) for e in zone.encodings)
    return f"{zone.display_name}: {zone.chart_kind.value}, {parts}"


def summarize_metadata(d: Dashboard) -> dict[str, Any]:
    """Deterministic, canonically-ordered metadata document for a dashboard.

    Covers per-chart position/encodings/mark kind, per-widget kind/label/
    options/target field, raw text content, and cross-view actions. Dataset
    rows are excluded; only column names/kinds and the row count travel.
    """
    charts = []
    widgets = []
    texts = []
    images = []
    for z in d.zones:
        position = _bounds_to_dict(z.bounds)
        if isinstance(z, ChartZone):
            charts.append({
                "id": z.id,
                "name": z.display_name,
                "summary": chart_summary(z),
                "chartKind": z.chart_kind.value,
                "position": position,
                "dataset": z.dataset,
                "encodings": [
                    {"channel": e.channel.value, "field": e.field,
                     "aggregate": e.aggregate.value}
                    for e in z.encodings
                ],
            })
        elif isinstance(z, WidgetZone):
            widgets.append({
                "id": z.id,
                "label": z.display_name,
                "widgetKind": z.widget_kind.value,
                "targetField": z.target_field,
                "dataset": z.dataset,
                "options": list(z.options),
                "position": position,
            })
        elif isinstance(z, TextZone):
            texts.append({"id": z.id, "content": z.content, "position": position})
        else:
            images.append({"id": z.id, "altText": z.alt_text, "position": position})

    return {
        "dashboard": {
            "id": d.id,
            "title": d.title,
            "size": {"width": d.width, "height": d.height},
        },
        "datasets": [
            {
                "name": ds.name,
                "columns": [{"name": c.name, "kind": c.kind} for c in ds.columns],
                "rowCount": len(ds.rows),
            }
            for ds in d.datasets
        ],
        "charts": charts,
        "widgets": widgets,
        "texts": texts,
        "images": images,
        "actions": [
            {
                "id": a.id,
                "sourceZone": a.source_zone,
                "targetZones": list(a.target_zones),
                "trigger": a.trigger.value,
                "behavior": a.behavior.value,
                "carriedFields": list(a.carried_fields),
            }
            for a in d.actions
        ],
    }


def serialize_metadata(ctx: dict[str, Any]) -> str:
    return canonical_json(ctx)
