/**
 * Pure renderer core: (dashboard, state) -> a scene of positioned marks and
 * widget descriptors, each carrying the exact semantic InteractionEvent its
 * activation emits. The DOM layer only draws the scene and forwards events;
 * nothing downstream ever sees pixel coordinates.
 */
import type {
  CellValue,
  ChartZoneDoc,
  DashboardDoc,
  EventDoc,
  StateDoc,
  WidgetZoneDoc,
  ZoneDoc,
} from './types.js';
import { aggregateView, datasetOf, highlightedRows, visibleRows } from './dataview.js';

export interface Mark {
  zoneId: string;
  key: string;
  shape: 'rect' | 'circle';
  x: number;
  y: number;
  w: number;
  h: number;
  label: string;
  highlighted: boolean;
  /** Semantic event emitted when this mark is clicked. */
  event: EventDoc;
}

export interface ChartScene {
  kind: 'chart';
  zone: ChartZoneDoc;
  marks: Mark[];
  /** Polyline vertices for line charts (same order as marks). */
  path: { x: number; y: number }[] | null;
  clearEvent: EventDoc;
}

export interface WidgetScene {
  kind: 'widget';
  zone: WidgetZoneDoc;
  selected: string[];
  /** Semantic event for choosing the given option set. */
  eventFor(values: string[]): EventDoc;
}

export interface StaticScene {
  kind: 'text' | 'image';
  zone: ZoneDoc;
  content: string;
}

export type ZoneScene = ChartScene | WidgetScene | StaticScene;

const PAD = { left: 34, right: 8, top: 20, bottom: 22 };

function plotArea(zone: ZoneDoc) {
  const { x, y, w, h } = zone.bounds;
  return {
    x: x + PAD.left,
    y: y + PAD.top,
    w: Math.max(10, w - PAD.left - PAD.right),
    h: Math.max(10, h - PAD.top - PAD.bottom),
  };
}

function markSelection(zoneId: string, tuple: Record<string, CellValue>): EventDoc {
  return { type: 'markSelection', zoneId, selectedTuples: [tuple] };
}

function barScene(dashboard: DashboardDoc, state: StateDoc,
                  zone: ChartZoneDoc): { marks: Mark[]; path: null } {
  const xEnc = zone.encodings.find((e) => e.channel === 'x')!;
  const view = aggregateView(dashboard, state, zone);
  const area = plotArea(zone);
  const top = Math.max(...view.map((cv) => cv.value), 0);
  const slot = view.length ? area.w / view.length : area.w;
  const highlights = highlightedRows(dashboard, state, zone);
  const ds = datasetOf(dashboard, zone.dataset);
  const xi = ds.columns.findIndex((c) => c.name === xEnc.field);

  const highlightedCats = new Set<CellValue>();
  for (const i of highlights) highlightedCats.add(ds.rows[i]![xi] as CellValue);

  const marks = view.map((cv, i) => {
    const height = top > 0 ? (Math.max(cv.value, 0) / top) * area.h : 0;
    return {
      zoneId: zone.id,
      key: String(cv.category),
      shape: 'rect' as const,
      x: area.x + i * slot + slot * 0.15,
      y: area.y + area.h - height,
      w: slot * 0.7,
      h: height,
      label: `${cv.category}: ${cv.value}`,
      highlighted: highlightedCats.has(cv.category),
      event: markSelection(zone.id, { [xEnc.field]: cv.category }),
    };
  });
  return { marks, path: null };
}

function pointScene(dashboard: DashboardDoc, state: StateDoc,
                    zone: ChartZoneDoc): { marks: Mark[]; path: { x: number; y: number }[] } {
  const xEnc = zone.encodings.find((e) => e.channel === 'x')!;
  const yEnc = zone.encodings.find((e) => e.channel === 'y')!;
  const ds = datasetOf(dashboard, zone.dataset);
  const xi = ds.columns.findIndex((c) => c.name === xEnc.field);
  const yi = ds.columns.findIndex((c) => c.name === yEnc.field);
  const area = plotArea(zone);
  const rows = visibleRows(dashboard, state, zone);
  const highlights = highlightedRows(dashboard, state, zone);

  const xNumeric = ds.columns[xi]!.kind === 'number';
  const xValues = ds.rows.map((r) => r[xi] as CellValue);
  const xCats = [...new Set(xValues)];
  const xNums = xNumeric ? (xValues as number[]) : [];
  const xMin = xNumeric ? Math.min(...xNums) : 0;
  const xSpan = xNumeric ? Math.max(Math.max(...xNums) - xMin, 1e-9) : 1;
  const yNums = ds.rows.map((r) => Number(r[yi]));
  const yMin = Math.min(...yNums, 0);
  const ySpan = Math.max(Math.max(...yNums, 0) - yMin, 1e-9);

  const marks = rows.map((ri) => {
    const row = ds.rows[ri]!;
    const xv = row[xi] as CellValue;
    const yv = Number(row[yi]);
    const fx = xNumeric
      ? (Number(xv) - xMin) / xSpan
      : (xCats.indexOf(xv) + 0.5) / xCats.length;
    const fy = (yv - yMin) / ySpan;
    const tuple: Record<string, CellValue> = { [xEnc.field]: xv };
    if (zone.chartKind === 'scatter') tuple[yEnc.field] = row[yi] as CellValue;
    return {
      zoneId: zone.id,
      key: `row-${ri}`,
      shape: 'circle' as const,
      x: area.x + fx * area.w,
      y: area.y + area.h - fy * area.h,
      w: 8,
      h: 8,
      label: `${xv}, ${yv}`,
      highlighted: highlights.has(ri),
      event: markSelection(zone.id, tuple),
    };
  });
  const path = marks.map((m) => ({ x: m.x, y: m.y }));
  return { marks, path };
}

export function chartScene(dashboard: DashboardDoc, state: StateDoc,
                           zone: ChartZoneDoc): ChartScene {
  const built = zone.chartKind === 'bar'
    ? barScene(dashboard, state, zone)
    : pointScene(dashboard, state, zone);
  return {
    kind: 'chart',
    zone,
    marks: built.marks,
    path: zone.chartKind === 'line' ? built.path : null,
    clearEvent: { type: 'clearSelection', zoneId: zone.id },
  };
}

export function widgetScene(dashboard: DashboardDoc, state: StateDoc,
                            zone: WidgetZoneDoc): WidgetScene {
  const predicates = Object.values(state.perZonePredicates)
    .flat()
    .filter((p) => p.field === zone.targetField);
  const selected = predicates.length
    ? predicates[0]!.values.map(String)
    : [];
  return {
    kind: 'widget',
    zone,
    selected,
    eventFor: (values: string[]) => ({
      type: 'widgetChange',
      zoneId: zone.id,
      newValue: values,
    }),
  };
}

export function buildScene(dashboard: DashboardDoc, state: StateDoc): ZoneScene[] {
  return dashboard.zones.map((zone): ZoneScene => {
    if (zone.type === 'chart') return chartScene(dashboard, state, zone);
    if (zone.type === 'widget') return widgetScene(dashboard, state, zone);
    return {
      kind: zone.type,
      zone,
      content: zone.type === 'text' ? zone.content : zone.altText,
    };
  });
}
