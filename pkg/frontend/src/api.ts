/**
 * Typed client for the tourforge service. The UI talks to the documented
 * API and nothing else; every mutation goes through here.
 */
import type {
  ChangeDoc,
  DashboardDoc,
  EventDoc,
  FrameDoc,
  InteractionLogDoc,
  StateDoc,
  TourDoc,
  TourMetadataDoc,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.code ?? 'error',
      body.message ?? response.statusText, body.details ?? {});
  } catch {
    return new ApiError(response.status, 'error', response.statusText);
  }
}

export class ApiClient {
  constructor(private base: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    if (response.status === 204) return undefined as T;
    return response.json() as Promise<T>;
  }

  // dashboards
  ingestDashboard(doc: DashboardDoc): Promise<DashboardDoc> {
    return this.request('POST', '/dashboards', doc);
  }

  listDashboards(): Promise<{ id: string; title: string }[]> {
    return this.request('GET', '/dashboards');
  }

  getDashboard(id: string): Promise<DashboardDoc> {
    return this.request('GET', `/dashboards/${encodeURIComponent(id)}`);
  }

  listTours(dashboardId: string): Promise<TourDoc[]> {
    return this.request('GET', `/dashboards/${encodeURIComponent(dashboardId)}/tours`);
  }

  // recording
  startRecording(dashboardId: string,
                 anchor?: { startState?: StateDoc; tourId?: string; position?: number },
  ): Promise<{ sessionId: string }> {
    return this.request('POST',
      `/dashboards/${encodeURIComponent(dashboardId)}/recordings`, anchor ?? {});
  }

  recordEvent(sessionId: string, event: EventDoc): Promise<ChangeDoc> {
    return this.request('POST', `/recordings/${sessionId}/events`, event);
  }

  stopRecording(sessionId: string): Promise<InteractionLogDoc> {
    return this.request('POST', `/recordings/${sessionId}/stop`);
  }

  // tours
  createTour(log: InteractionLogDoc, metadata: Partial<TourMetadataDoc>,
             id?: string): Promise<TourDoc> {
    return this.request('POST', '/tours', { id, log, metadata });
  }

  getTour(id: string): Promise<TourDoc> {
    return this.request('GET', `/tours/${encodeURIComponent(id)}`);
  }

  putTour(tour: TourDoc): Promise<TourDoc> {
    return this.request('PUT', `/tours/${encodeURIComponent(tour.id)}`, tour);
  }

  deleteTour(id: string): Promise<void> {
    return this.request('DELETE', `/tours/${encodeURIComponent(id)}`);
  }

  generate(tourId: string, mode: 'template' | 'llm'): Promise<TourDoc> {
    return this.request('POST', `/tours/${encodeURIComponent(tourId)}/generate`, { mode });
  }

  regenerateStep(tourId: string, index: number, body: {
    goal?: string; instruction?: string; mode?: 'template' | 'llm';
  }): Promise<TourDoc> {
    return this.request('POST',
      `/tours/${encodeURIComponent(tourId)}/steps/${index}/regenerate`, body);
  }

  updateStep(tourId: string, index: number, body: {
    title?: string;
    description?: string;
    goalOverride?: string | null;
    stepInstruction?: string | null;
    overlayOffset?: { dx: number; dy: number } | null;
  }): Promise<TourDoc> {
    return this.request('PUT',
      `/tours/${encodeURIComponent(tourId)}/steps/${index}`, body);
  }

  insertSteps(tourId: string, body: { position: number } &
      ({ instruction: string } | { log: InteractionLogDoc })): Promise<TourDoc> {
    return this.request('POST', `/tours/${encodeURIComponent(tourId)}/steps`, body);
  }

  // playback
  frames(tourId: string): Promise<FrameDoc[]> {
    return this.request('GET', `/tours/${encodeURIComponent(tourId)}/frames`);
  }

  frame(tourId: string, index: number): Promise<FrameDoc> {
    return this.request('GET', `/tours/${encodeURIComponent(tourId)}/frames/${index}`);
  }
}
