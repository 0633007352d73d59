/**
 * Wire types mirroring the service's documented JSON schemas
 * (docs/schemas.md in the repository root).
 */

export type CellValue = string | number;

export interface ColumnDoc {
  name: string;
  kind: 'string' | 'number';
}

export interface DatasetDoc {
  name: string;
  columns: ColumnDoc[];
  rows: CellValue[][];
}

export interface BoundsDoc {
  x: number;
  y: number;
  w: number;
  h: number;
}

export type Channel = 'x' | 'y' | 'color';
export type AggregateKind = 'none' | 'sum' | 'avg' | 'count';

export interface EncodingDoc {
  channel: Channel;
  field: string;
  aggregate?: AggregateKind;
}

export interface ChartZoneDoc {
  id: string;
  bounds: BoundsDoc;
  type: 'chart';
  worksheetName: string;
  chartKind: 'bar' | 'scatter' | 'line';
  dataset: string;
  encodings: EncodingDoc[];
}

export interface WidgetZoneDoc {
  id: string;
  bounds: BoundsDoc;
  type: 'widget';
  widgetKind: 'button' | 'dropdown' | 'checkbox' | 'radio';
  targetField: string;
  dataset: string;
  options: string[];
  label: string;
}

export interface TextZoneDoc {
  id: string;
  bounds: BoundsDoc;
  type: 'text';
  content: string;
}

export interface ImageZoneDoc {
  id: string;
  bounds: BoundsDoc;
  type: 'image';
  altText: string;
}

export type ZoneDoc = ChartZoneDoc | WidgetZoneDoc | TextZoneDoc | ImageZoneDoc;

export interface ActionDoc {
  id: string;
  sourceZone: string;
  targetZones: string[];
  trigger: 'select' | 'brush' | 'widgetChange';
  behavior: 'filter' | 'highlight';
  carriedFields: string[];
}

export interface DashboardDoc {
  id: string;
  title: string;
  size: { width: number; height: number };
  datasets: DatasetDoc[];
  zones: ZoneDoc[];
  actions: ActionDoc[];
}

export interface PredicateDoc {
  field: string;
  op: 'equals' | 'in' | 'range';
  values: CellValue[];
}

export interface StateDoc {
  perZonePredicates: Record<string, PredicateDoc[]>;
  perZoneHighlights: Record<string, PredicateDoc[]>;
}

export type EventDoc =
  | { type: 'markSelection'; zoneId: string; selectedTuples: Record<string, CellValue>[] }
  | { type: 'brush'; zoneId: string; extents: PredicateDoc[] }
  | { type: 'widgetChange'; zoneId: string; newValue: string[] }
  | { type: 'clearSelection'; zoneId: string };

export interface ChangeEntryDoc {
  targetZoneId: string;
  behavior: 'filter' | 'highlight';
  appliedPredicates: PredicateDoc[];
  rowsBefore: number;
  rowsAfter: number;
  viewAfter: [CellValue, number][];
}

export interface ChangeDoc {
  entries: ChangeEntryDoc[];
}

export interface LogStepDoc {
  event: EventDoc;
  coordinatedViewChange: ChangeDoc;
}

export interface InteractionLogDoc {
  dashboardId: string;
  startState: StateDoc;
  steps: LogStepDoc[];
}

export type CommunicationGoal = 'dashboardSemantics' | 'interactionGuide' | 'dataFacts';

export interface TourMetadataDoc {
  goal: CommunicationGoal;
  instruction: string | null;
  title: string | null;
}

export interface TourStepDoc {
  id: string;
  kind: 'interactive' | 'standalone';
  event: EventDoc | null;
  coordinatedViewChange: ChangeDoc | null;
  title: string;
  description: string;
  goalOverride: CommunicationGoal | null;
  stepInstruction: string | null;
  overlayOffset: { dx: number; dy: number } | null;
  contentOrigin: 'generated' | 'template' | 'manual' | null;
  stale: boolean;
}

export interface TourDoc {
  id: string;
  dashboardId: string;
  metadata: TourMetadataDoc;
  startState: StateDoc;
  revision: number;
  steps: TourStepDoc[];
}

export interface FrameDoc {
  index: number;
  stateDigest: string;
  anchor: { x: number; y: number };
  targetZoneId: string | null;
  title: string;
  description: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export function initialState(): StateDoc {
  return { perZonePredicates: {}, perZoneHighlights: {} };
}
