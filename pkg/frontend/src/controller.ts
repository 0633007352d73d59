/**
 * Application flows behind the authoring surface, kept free of DOM concerns
 * so the full recording/editing/playback behavior is testable headlessly.
 * State changes notify a single listener; the DOM layer re-renders from
 * whatever the controller holds.
 */
import type { ApiClient } from './api.js';
import { ApiError } from './api.js';
import type {
  ChangeDoc,
  CommunicationGoal,
  DashboardDoc,
  EventDoc,
  FrameDoc,
  InteractionLogDoc,
  StateDoc,
  TourDoc,
} from './types.js';
import { initialState } from './types.js';

export interface CapturedStep {
  event: EventDoc;
  change: ChangeDoc;
  summary: string;
}

export interface RecordingState {
  sessionId: string;
  goal: CommunicationGoal;
  instruction?: string;
  title?: string;
  captured: CapturedStep[];
  /** Set when recording between existing steps. */
  splice?: { tourId: string; position: number };
}

export interface PlaybackState {
  tourId: string;
  frames: FrameDoc[];
  index: number;
  /** Play-all hides the authoring chrome. */
  hideChrome: boolean;
}

function summarize(event: EventDoc, change: ChangeDoc): string {
  const effects = change.entries
    .map((e) => `${e.targetZoneId}: ${e.rowsBefore} -> ${e.rowsAfter} rows`)
    .join(', ');
  return effects ? `${event.type} (${effects})` : event.type;
}

/** Apply a recorded change to the client's local view state mirror. */
export function foldChange(state: StateDoc, event: EventDoc, change: ChangeDoc): StateDoc {
  const next: StateDoc = {
    perZonePredicates: { ...state.perZonePredicates },
    perZoneHighlights: { ...state.perZoneHighlights },
  };
  for (const entry of change.entries) {
    const bucket = entry.behavior === 'filter' ? next.perZonePredicates : next.perZoneHighlights;
    const existing = bucket[entry.targetZoneId] ?? [];
    const fields = new Set(entry.appliedPredicates.map((p) => p.field));
    let kept = existing.filter((p) => !fields.has(p.field));
    if (!entry.appliedPredicates.length) {
      // clearing entry: predicates that vanished are those the event's zone
      // carried; recompute conservatively by dropping everything the server
      // reported as restored
      kept = [];
    }
    const merged = [...kept, ...entry.appliedPredicates];
    if (merged.length) bucket[entry.targetZoneId] = merged;
    else delete bucket[entry.targetZoneId];
  }
  return next;
}

export class AppController {
  dashboards: { id: string; title: string }[] = [];
  dashboard: DashboardDoc | null = null;
  viewState: StateDoc = initialState();
  tours: TourDoc[] = [];
  recording: RecordingState | null = null;
  playback: PlaybackState | null = null;
  lastError: ApiError | null = null;
  generationMode: 'template' | 'llm' = 'template';

  private listeners: (() => void)[] = [];

  constructor(public api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  // -- dashboard ------------------------------------------------------------

  async loadDashboards(): Promise<void> {
    this.dashboards = await this.api.listDashboards();
    this.notify();
  }

  async openDashboard(id: string): Promise<void> {
    this.dashboard = await this.api.getDashboard(id);
    this.viewState = initialState();
    await this.refreshTours();
  }

  async refreshTours(): Promise<void> {
    if (!this.dashboard) return;
    this.tours = await this.api.listTours(this.dashboard.id);
    this.notify();
  }

  tour(tourId: string): TourDoc {
    const tour = this.tours.find((t) => t.id === tourId);
    if (!tour) throw new Error(`tour ${tourId} not loaded`);
    return tour;
  }

  private replaceTour(updated: TourDoc): void {
    const index = this.tours.findIndex((t) => t.id === updated.id);
    if (index >= 0) this.tours[index] = updated;
    else this.tours.push(updated);
    this.notify();
  }

  // -- recording flow ---------------------------------------------------------

  async startRecording(meta: { goal: CommunicationGoal; instruction?: string; title?: string },
                       splice?: { tourId: string; position: number }): Promise<void> {
    if (!this.dashboard) throw new Error('no dashboard open');
    const { sessionId } = await this.api.startRecording(
      this.dashboard.id,
      splice ? { tourId: splice.tourId, position: splice.position } : {},
    );
    this.recording = { sessionId, ...meta, captured: [], splice };
    this.notify();
  }

  /** A semantic event arrived from the renderer while recording. */
  async captureEvent(event: EventDoc): Promise<ChangeDoc> {
    if (!this.recording) throw new Error('not recording');
    const change = await this.api.recordEvent(this.recording.sessionId, event);
    this.recording.captured.push({ event, change, summary: summarize(event, change) });
    this.viewState = foldChange(this.viewState, event, change);
    this.notify();
    return change;
  }

  /** Stop, create the tour, and run the initial generation. */
  async stopRecordingAndCreate(tourId?: string): Promise<TourDoc> {
    if (!this.recording) throw new Error('not recording');
    const { sessionId, goal, instruction, title } = this.recording;
    const log = await this.api.stopRecording(sessionId);
    this.recording = null;
    const skeleton = await this.api.createTour(log, {
      goal,
      instruction: instruction ?? null,
      title: title ?? null,
    }, tourId);
    const generated = await this.api.generate(skeleton.id, this.generationMode);
    this.replaceTour(generated);
    return generated;
  }

  /** Stop a between-steps recording and splice it into the tour. */
  async stopRecordingAndSplice(): Promise<TourDoc> {
    if (!this.recording?.splice) throw new Error('not a splice recording');
    const { tourId, position } = this.recording.splice;
    const log: InteractionLogDoc = await this.api.stopRecording(this.recording.sessionId);
    this.recording = null;
    const updated = await this.api.insertSteps(tourId, { position, log });
    this.replaceTour(updated);
    return updated;
  }

  cancelRecording(): void {
    this.recording = null;
    this.notify();
  }

  // -- tour card & step editing -----------------------------------------------

  async saveTour(tour: TourDoc): Promise<boolean> {
    try {
      this.replaceTour(await this.api.putTour(tour));
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // optimistic update lost: reconcile by reloading the stored tour
        this.replaceTour(await this.api.getTour(tour.id));
        this.lastError = error;
        this.notify();
        return false;
      }
      throw error;
    }
  }

  async deleteTour(tourId: string): Promise<void> {
    await this.api.deleteTour(tourId);
    this.tours = this.tours.filter((t) => t.id !== tourId);
    if (this.playback?.tourId === tourId) this.playback = null;
    this.notify();
  }

  async regenerateTour(tourId: string): Promise<void> {
    this.replaceTour(await this.api.generate(tourId, this.generationMode));
  }

  async editStepContent(tourId: string, index: number,
                        content: { title?: string; description?: string }): Promise<void> {
    this.replaceTour(await this.api.updateStep(tourId, index, content));
  }

  async setStepGoal(tourId: string, index: number,
                    goal: CommunicationGoal | null, instruction?: string): Promise<void> {
    this.replaceTour(await this.api.updateStep(tourId, index, {
      goalOverride: goal,
      ...(instruction !== undefined ? { stepInstruction: instruction } : {}),
    }));
  }

  async regenerateStep(tourId: string, index: number,
                       options: { goal?: CommunicationGoal; instruction?: string } = {},
  ): Promise<void> {
    this.replaceTour(await this.api.regenerateStep(tourId, index, {
      ...options,
      mode: this.generationMode,
    }));
  }

  async insertStandalone(tourId: string, position: number,
                         instruction: string): Promise<void> {
    this.replaceTour(await this.api.insertSteps(tourId, { position, instruction }));
  }

  async deleteStepViaSave(tourId: string, index: number): Promise<boolean> {
    // step deletion is a structural edit expressed through PUT of the whole
    // tour; the service re-validates and flags stale steps
    const tour = this.tour(tourId);
    const steps = tour.steps.filter((_, i) => i !== index);
    return this.saveTour({ ...tour, steps, revision: tour.revision + 1 });
  }

  /** Persist a drag as a delta on the step's current overlay offset. */
  async dragOverlay(tourId: string, index: number, dx: number, dy: number): Promise<void> {
    const step = this.tour(tourId).steps[index];
    if (!step) throw new Error(`no step ${index}`);
    const base = step.overlayOffset ?? { dx: 0, dy: 0 };
    const updated = await this.api.updateStep(tourId, index, {
      overlayOffset: { dx: base.dx + dx, dy: base.dy + dy },
    });
    this.replaceTour(updated);
    if (this.playback?.tourId === tourId) {
      this.playback.frames = await this.api.frames(tourId);
      this.notify();
    }
  }

  // -- playback ------------------------------------------------------------------

  async playStep(tourId: string, index: number): Promise<FrameDoc> {
    const frames = await this.api.frames(tourId);
    this.playback = { tourId, frames, index, hideChrome: false };
    this.notify();
    const frame = frames[index];
    if (!frame) throw new Error(`no frame ${index}`);
    return frame;
  }

  async playAll(tourId: string): Promise<FrameDoc[]> {
    const frames = await this.api.frames(tourId);
    this.playback = { tourId, frames, index: 0, hideChrome: true };
    this.notify();
    return frames;
  }

  nextFrame(): FrameDoc | null {
    if (!this.playback) return null;
    if (this.playback.index + 1 >= this.playback.frames.length) return null;
    this.playback.index += 1;
    this.notify();
    return this.playback.frames[this.playback.index] ?? null;
  }

  prevFrame(): FrameDoc | null {
    if (!this.playback || this.playback.index === 0) return null;
    this.playback.index -= 1;
    this.notify();
    return this.playback.frames[this.playback.index] ?? null;
  }

  exitPlayback(): void {
    this.playback = null;
    this.notify();
  }

  currentFrame(): FrameDoc | null {
    return this.playback?.frames[this.playback.index] ?? null;
  }
}
