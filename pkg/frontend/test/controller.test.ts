/**
 * Controller flows against a scripted API stub: the recording flow issues
 * exactly the documented call sequence, drags compose offsets, and 409
 * conflicts reconcile by reloading.
 */
import { describe, expect, it } from 'vitest';

import { ApiError, type ApiClient } from '../src/api.js';
import { AppController, foldChange } from '../src/controller.js';
import { initialState } from '../src/types.js';
import type {
  ChangeDoc,
  EventDoc,
  FrameDoc,
  InteractionLogDoc,
  TourDoc,
} from '../src/types.js';
import { salesMini } from './fixtures.js';

const CHANGE: ChangeDoc = {
  entries: [{
    targetZoneId: 'product-chart',
    behavior: 'filter',
    appliedPredicates: [{ field: 'region', op: 'equals', values: ['East'] }],
    rowsBefore: 4,
    rowsAfter: 2,
    viewAfter: [['A', 10], ['B', 20]],
  }],
};

const EVENT: EventDoc = {
  type: 'markSelection', zoneId: 'region-chart', selectedTuples: [{ region: 'East' }],
};

function makeTour(overrides: Partial<TourDoc> = {}): TourDoc {
  return {
    id: 'tour-1',
    dashboardId: 'sales-mini',
    metadata: { goal: 'interactionGuide', instruction: null, title: null },
    startState: initialState(),
    revision: 1,
    steps: [{
      id: 's1', kind: 'interactive', event: EVENT, coordinatedViewChange: CHANGE,
      title: '', description: '', goalOverride: null, stepInstruction: null,
      overlayOffset: null, contentOrigin: null, stale: false,
    }],
    ...overrides,
  };
}

const LOG: InteractionLogDoc = {
  dashboardId: 'sales-mini',
  startState: initialState(),
  steps: [{ event: EVENT, coordinatedViewChange: CHANGE }],
};

const FRAMES: FrameDoc[] = [
  { index: 0, stateDigest: 'd0', anchor: { x: 388, y: 288 },
    targetZoneId: 'region-chart', title: 'Step 1', description: 'one' },
  { index: 1, stateDigest: 'd1', anchor: { x: 228, y: 348 },
    targetZoneId: 'region-filter', title: 'Step 2', description: 'two' },
];

interface Call { method: string; args: unknown[] }

function stubApi(tour: TourDoc) {
  const calls: Call[] = [];
  let stored = tour;
  let failPutOnce = false;
  const api = {
    calls,
    get stored() { return stored; },
    set stored(t: TourDoc) { stored = t; },
    failNextPut() { failPutOnce = true; },

    async listDashboards() {
      calls.push({ method: 'listDashboards', args: [] });
      return [{ id: 'sales-mini', title: 'Sales Mini' }];
    },
    async getDashboard(id: string) {
      calls.push({ method: 'getDashboard', args: [id] });
      return salesMini();
    },
    async listTours(dashboardId: string) {
      calls.push({ method: 'listTours', args: [dashboardId] });
      return [stored];
    },
    async startRecording(dashboardId: string, anchor: unknown) {
      calls.push({ method: 'startRecording', args: [dashboardId, anchor] });
      return { sessionId: 'sess-1' };
    },
    async recordEvent(sessionId: string, event: EventDoc) {
      calls.push({ method: 'recordEvent', args: [sessionId, event] });
      return CHANGE;
    },
    async stopRecording(sessionId: string) {
      calls.push({ method: 'stopRecording', args: [sessionId] });
      return LOG;
    },
    async createTour(log: InteractionLogDoc, metadata: unknown, id?: string) {
      calls.push({ method: 'createTour', args: [log, metadata, id] });
      return stored;
    },
    async generate(tourId: string, mode: string) {
      calls.push({ method: 'generate', args: [tourId, mode] });
      stored = {
        ...stored,
        revision: stored.revision + 1,
        steps: stored.steps.map((s) => ({
          ...s, title: 'Generated', description: 'text', contentOrigin: 'template' as const,
        })),
      };
      return stored;
    },
    async getTour(id: string) {
      calls.push({ method: 'getTour', args: [id] });
      return stored;
    },
    async putTour(t: TourDoc) {
      calls.push({ method: 'putTour', args: [t] });
      if (failPutOnce) {
        failPutOnce = false;
        throw new ApiError(409, 'revision_conflict', 'stale revision');
      }
      stored = t;
      return stored;
    },
    async deleteTour(id: string) {
      calls.push({ method: 'deleteTour', args: [id] });
    },
    async regenerateStep(tourId: string, index: number, body: unknown) {
      calls.push({ method: 'regenerateStep', args: [tourId, index, body] });
      return stored;
    },
    async updateStep(tourId: string, index: number, body: Record<string, unknown>) {
      calls.push({ method: 'updateStep', args: [tourId, index, body] });
      const steps = stored.steps.map((s, i) => (i === index ? { ...s, ...body } : s));
      stored = { ...stored, steps: steps as TourDoc['steps'], revision: stored.revision + 1 };
      return stored;
    },
    async insertSteps(tourId: string, body: { position: number }) {
      calls.push({ method: 'insertSteps', args: [tourId, body] });
      return stored;
    },
    async frames(tourId: string) {
      calls.push({ method: 'frames', args: [tourId] });
      return FRAMES;
    },
    async frame(tourId: string, index: number) {
      calls.push({ method: 'frame', args: [tourId, index] });
      return FRAMES[index]!;
    },
    async ingestDashboard(doc: unknown) {
      calls.push({ method: 'ingestDashboard', args: [doc] });
      return salesMini();
    },
  };
  return api;
}

async function openController(api: ReturnType<typeof stubApi>) {
  const controller = new AppController(api as unknown as ApiClient);
  await controller.openDashboard('sales-mini');
  return controller;
}

describe('recording flow', () => {
  it('issues the documented call sequence and folds view state', async () => {
    const api = stubApi(makeTour());
    const controller = await openController(api);

    await controller.startRecording({ goal: 'interactionGuide' });
    await controller.captureEvent(EVENT);
    const tour = await controller.stopRecordingAndCreate('tour-1');

    const sequence = api.calls.map((c) => c.method);
    expect(sequence).toEqual([
      'getDashboard', 'listTours',
      'startRecording', 'recordEvent', 'stopRecording', 'createTour', 'generate',
    ]);
    expect(tour.steps[0]!.title).toBe('Generated');
    // captured change folded into the local view state for live rendering
    expect(controller.viewState.perZonePredicates['product-chart']).toEqual([
      { field: 'region', op: 'equals', values: ['East'] },
    ]);
    const createCall = api.calls.find((c) => c.method === 'createTour')!;
    expect(createCall.args[1]).toEqual({
      goal: 'interactionGuide', instruction: null, title: null,
    });
    expect(createCall.args[2]).toBe('tour-1');
  });

  it('between-steps recording anchors at {tourId, position} and splices', async () => {
    const api = stubApi(makeTour());
    const controller = await openController(api);
    await controller.startRecording({ goal: 'interactionGuide' },
                                    { tourId: 'tour-1', position: 1 });
    await controller.captureEvent(EVENT);
    await controller.stopRecordingAndSplice();
    const start = api.calls.find((c) => c.method === 'startRecording')!;
    expect(start.args[1]).toEqual({ tourId: 'tour-1', position: 1 });
    const insert = api.calls.find((c) => c.method === 'insertSteps')!;
    expect(insert.args[1]).toEqual({ position: 1, log: LOG });
  });
});

describe('editing', () => {
  it('drag composes with the existing overlay offset', async () => {
    const api = stubApi(makeTour());
    const controller = await openController(api);
    await controller.dragOverlay('tour-1', 0, 30, 40);
    await controller.dragOverlay('tour-1', 0, 5, -10);
    const updates = api.calls.filter((c) => c.method === 'updateStep');
    expect(updates[0]!.args[2]).toEqual({ overlayOffset: { dx: 30, dy: 40 } });
    expect(updates[1]!.args[2]).toEqual({ overlayOffset: { dx: 35, dy: 30 } });
  });

  it('revision conflict reloads the stored tour and reports failure', async () => {
    const api = stubApi(makeTour());
    const controller = await openController(api);
    api.failNextPut();
    const edited = { ...controller.tour('tour-1'), revision: 99 };
    const saved = await controller.saveTour(edited);
    expect(saved).toBe(false);
    expect(api.calls.map((c) => c.method)).toContain('getTour');
    expect(controller.tour('tour-1').revision).toBe(1); // reconciled to stored
    expect(controller.lastError?.code).toBe('revision_conflict');
  });
});

describe('playback', () => {
  it('play-all hides chrome and navigates frames', async () => {
    const api = stubApi(makeTour());
    const controller = await openController(api);
    const frames = await controller.playAll('tour-1');
    expect(frames).toHaveLength(2);
    expect(controller.playback?.hideChrome).toBe(true);
    expect(controller.currentFrame()?.index).toBe(0);
    expect(controller.nextFrame()?.index).toBe(1);
    expect(controller.nextFrame()).toBeNull();
    expect(controller.prevFrame()?.index).toBe(0);
    controller.exitPlayback();
    expect(controller.playback).toBeNull();
  });

  it('per-step play keeps chrome visible', async () => {
    const api = stubApi(makeTour());
    const controller = await openController(api);
    const frame = await controller.playStep('tour-1', 1);
    expect(frame.index).toBe(1);
    expect(controller.playback?.hideChrome).toBe(false);
  });
});

describe('foldChange', () => {
  it('replaces same-field predicates and drops cleared zones', () => {
    const one = foldChange(initialState(), EVENT, CHANGE);
    const replaced = foldChange(one, EVENT, {
      entries: [{
        ...CHANGE.entries[0]!,
        appliedPredicates: [{ field: 'region', op: 'equals', values: ['West'] }],
      }],
    });
    expect(replaced.perZonePredicates['product-chart']).toEqual([
      { field: 'region', op: 'equals', values: ['West'] },
    ]);
    const cleared = foldChange(replaced,
      { type: 'clearSelection', zoneId: 'region-chart' },
      { entries: [{ ...CHANGE.entries[0]!, appliedPredicates: [], rowsBefore: 2, rowsAfter: 4 }] });
    expect(cleared.perZonePredicates['product-chart']).toBeUndefined();
  });
});
