/** The client-side view mirror must agree with the engine's frozen numbers. */
import { describe, expect, it } from 'vitest';

import { aggregateView, visibleRows } from '../src/dataview.js';
import { initialState } from '../src/types.js';
import type { ChartZoneDoc, StateDoc } from '../src/types.js';
import { salesMini } from './fixtures.js';

function productChart(): ChartZoneDoc {
  return salesMini().zones.find((z) => z.id === 'product-chart') as ChartZoneDoc;
}

function eastState(): StateDoc {
  return {
    perZonePredicates: {
      'product-chart': [{ field: 'region', op: 'equals', values: ['East'] }],
    },
    perZoneHighlights: {},
  };
}

describe('visibleRows', () => {
  it('returns every row for the initial state', () => {
    expect(visibleRows(salesMini(), initialState(), productChart())).toEqual([0, 1, 2, 3]);
  });

  it('filters by equals predicate (engine-frozen: rows 0 and 1)', () => {
    expect(visibleRows(salesMini(), eastState(), productChart())).toEqual([0, 1]);
  });

  it('treats an empty in-predicate as unsatisfiable', () => {
    const state: StateDoc = {
      perZonePredicates: { 'product-chart': [{ field: 'region', op: 'in', values: [] }] },
      perZoneHighlights: {},
    };
    expect(visibleRows(salesMini(), state, productChart())).toEqual([]);
  });

  it('applies inclusive range predicates', () => {
    const state: StateDoc = {
      perZonePredicates: {
        'product-chart': [{ field: 'sales', op: 'range', values: [10, 30] }],
      },
      perZoneHighlights: {},
    };
    expect(visibleRows(salesMini(), state, productChart())).toEqual([0, 1, 2]);
  });
});

describe('aggregateView', () => {
  it('matches the engine: [(A,40),(B,60)] initially', () => {
    expect(aggregateView(salesMini(), initialState(), productChart())).toEqual([
      { category: 'A', value: 40 },
      { category: 'B', value: 60 },
    ]);
  });

  it('matches the engine under the East filter: [(A,10),(B,20)]', () => {
    expect(aggregateView(salesMini(), eastState(), productChart())).toEqual([
      { category: 'A', value: 10 },
      { category: 'B', value: 20 },
    ]);
  });

  it('supports count and avg aggregates', () => {
    const chart = productChart();
    const counted: ChartZoneDoc = {
      ...chart,
      encodings: [
        { channel: 'x', field: 'product', aggregate: 'none' },
        { channel: 'y', field: 'sales', aggregate: 'count' },
      ],
    };
    expect(aggregateView(salesMini(), initialState(), counted)).toEqual([
      { category: 'A', value: 2 },
      { category: 'B', value: 2 },
    ]);
    const averaged: ChartZoneDoc = {
      ...counted,
      encodings: [
        { channel: 'x', field: 'product', aggregate: 'none' },
        { channel: 'y', field: 'sales', aggregate: 'avg' },
      ],
    };
    expect(aggregateView(salesMini(), initialState(), averaged)).toEqual([
      { category: 'A', value: 20 },
      { category: 'B', value: 30 },
    ]);
  });
});
