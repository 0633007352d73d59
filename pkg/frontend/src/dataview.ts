/**
 * Client-side mirror of the engine's view computation, used only to draw
 * charts under the current state. The service remains the authority for
 * recorded changes; these numbers never travel back to it.
 */
import type {
  CellValue,
  ChartZoneDoc,
  DashboardDoc,
  DatasetDoc,
  PredicateDoc,
  StateDoc,
} from './types.js';

export function datasetOf(dashboard: DashboardDoc, name: string): DatasetDoc {
  const ds = dashboard.datasets.find((d) => d.name === name);
  if (!ds) throw new Error(`unknown dataset ${name}`);
  return ds;
}

function columnIndex(ds: DatasetDoc, field: string): number {
  const index = ds.columns.findIndex((c) => c.name === field);
  if (index < 0) throw new Error(`unknown column ${field} in ${ds.name}`);
  return index;
}

function matches(p: PredicateDoc, value: CellValue): boolean {
  if (p.op === 'equals') return value === p.values[0];
  if (p.op === 'in') return p.values.includes(value);
  const [lo, hi] = p.values;
  if (lo === undefined || hi === undefined) return false;
  return lo <= value && value <= hi;
}

export function visibleRows(dashboard: DashboardDoc, state: StateDoc,
                            chart: ChartZoneDoc): number[] {
  const ds = datasetOf(dashboard, chart.dataset);
  const predicates = state.perZonePredicates[chart.id] ?? [];
  const bound = predicates.map((p) => ({ p, ci: columnIndex(ds, p.field) }));
  const out: number[] = [];
  ds.rows.forEach((row, i) => {
    if (bound.every(({ p, ci }) => matches(p, row[ci] as CellValue))) out.push(i);
  });
  return out;
}

export function highlightedRows(dashboard: DashboardDoc, state: StateDoc,
                                chart: ChartZoneDoc): Set<number> {
  const ds = datasetOf(dashboard, chart.dataset);
  const predicates = state.perZoneHighlights[chart.id] ?? [];
  if (!predicates.length) return new Set();
  const bound = predicates.map((p) => ({ p, ci: columnIndex(ds, p.field) }));
  const out = new Set<number>();
  ds.rows.forEach((row, i) => {
    if (bound.every(({ p, ci }) => matches(p, row[ci] as CellValue))) out.add(i);
  });
  return out;
}

export interface CategoryValue {
  category: CellValue;
  value: number;
}

/** Group visible rows by the x field; a y aggregate of `none` rolls up as sum. */
export function aggregateView(dashboard: DashboardDoc, state: StateDoc,
                              chart: ChartZoneDoc): CategoryValue[] {
  const ds = datasetOf(dashboard, chart.dataset);
  const xEnc = chart.encodings.find((e) => e.channel === 'x');
  const yEnc = chart.encodings.find((e) => e.channel === 'y');
  if (!xEnc || !yEnc) return [];
  const xi = columnIndex(ds, xEnc.field);
  const yi = columnIndex(ds, yEnc.field);

  const order: CellValue[] = [];
  for (const row of ds.rows) {
    const cat = row[xi] as CellValue;
    if (!order.includes(cat)) order.push(cat);
  }
  const groups = new Map<CellValue, number[]>();
  for (const i of visibleRows(dashboard, state, chart)) {
    const row = ds.rows[i]!;
    const cat = row[xi] as CellValue;
    if (!groups.has(cat)) groups.set(cat, []);
    groups.get(cat)!.push(Number(row[yi]));
  }

  const agg = yEnc.aggregate ?? 'none';
  const out: CategoryValue[] = [];
  for (const cat of order) {
    const values = groups.get(cat);
    if (!values || !values.length) continue;
    if (agg === 'count') out.push({ category: cat, value: values.length });
    else if (agg === 'avg') {
      out.push({ category: cat, value: values.reduce((a, b) => a + b, 0) / values.length });
    } else out.push({ category: cat, value: values.reduce((a, b) => a + b, 0) });
  }
  return out;
}
