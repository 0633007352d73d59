/**
 * Bootstrap: wires the controller to the DOM. Layout: a sidebar with tour
 * cards and recording controls, the dashboard canvas on the right, and an
 * overlay layer on top of the canvas for playback.
 */
import { ApiClient } from './api.js';
import { AppController } from './controller.js';
import { buildScene } from './scene.js';
import { renderDashboard } from './render.js';
import { renderOverlay } from './overlay.js';
import type { CommunicationGoal, EventDoc, TourDoc, TourStepDoc } from './types.js';

const GOALS: { value: CommunicationGoal; label: string }[] = [
  { value: 'dashboardSemantics', label: 'Dashboard semantics' },
  { value: 'interactionGuide', label: 'Interaction guide' },
  { value: 'dataFacts', label: 'Data facts' },
];

const api = new ApiClient('');
const controller = new AppController(api);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(label: string, title: string, onClick: () => void): HTMLButtonElement {
  const node = el('button', 'icon-button', label);
  node.title = title;
  node.addEventListener('click', onClick);
  return node;
}

// -- metadata modal -----------------------------------------------------------

function goalModal(heading: string, submitLabel: string,
                   onSubmit: (meta: { goal: CommunicationGoal; instruction?: string;
                                       title?: string }) => void): void {
  const backdrop = el('div', 'modal-backdrop');
  const modal = el('div', 'modal');
  modal.appendChild(el('h2', undefined, heading));

  const goalSelect = el('select');
  for (const goal of GOALS) {
    const option = el('option', undefined, goal.label);
    option.setAttribute('value', goal.value);
    goalSelect.appendChild(option);
  }
  const goalRow = el('label', 'modal-row', 'Communication goal ');
  goalRow.appendChild(goalSelect);

  const instruction = el('textarea');
  instruction.placeholder = 'Optional instruction, e.g. "Write the tour in third-person point of view."';
  const title = el('input');
  title.placeholder = 'Optional title';

  const actions = el('div', 'modal-actions');
  const cancel = el('button', undefined, 'Cancel');
  cancel.addEventListener('click', () => backdrop.remove());
  const submit = el('button', 'primary', submitLabel);
  submit.addEventListener('click', () => {
    backdrop.remove();
    onSubmit({
      goal: goalSelect.value as CommunicationGoal,
      instruction: instruction.value || undefined,
      title: title.value || undefined,
    });
  });
  actions.append(cancel, submit);
  modal.append(goalRow, instruction, title, actions);
  backdrop.appendChild(modal);
  document.body.appendChild(backdrop);
}

function stepEditModal(tour: TourDoc, index: number): void {
  const step = tour.steps[index]!;
  const backdrop = el('div', 'modal-backdrop');
  const modal = el('div', 'modal');
  modal.appendChild(el('h2', undefined, `Edit step ${index + 1}`));

  const goalSelect = el('select');
  const inherit = el('option', undefined, `Tour goal (${tour.metadata.goal})`);
  inherit.setAttribute('value', '');
  goalSelect.appendChild(inherit);
  for (const goal of GOALS) {
    const option = el('option', undefined, goal.label);
    option.setAttribute('value', goal.value);
    if (step.goalOverride === goal.value) option.selected = true;
    goalSelect.appendChild(option);
  }
  const goalRow = el('label', 'modal-row', 'Step goal ');
  goalRow.appendChild(goalSelect);

  const instruction = el('textarea');
  instruction.placeholder = 'Optional instruction for regeneration';
  instruction.value = step.stepInstruction ?? '';
  const titleInput = el('input');
  titleInput.value = step.title;
  const description = el('textarea');
  description.value = step.description;

  const actions = el('div', 'modal-actions');
  const cancel = el('button', undefined, 'Cancel');
  cancel.addEventListener('click', () => backdrop.remove());
  const regenerate = el('button', undefined, 'Regenerate');
  regenerate.addEventListener('click', async () => {
    backdrop.remove();
    const goal = (goalSelect.value || undefined) as CommunicationGoal | undefined;
    await controller.regenerateStep(tour.id, index, {
      ...(goal ? { goal } : {}),
      ...(instruction.value ? { instruction: instruction.value } : {}),
    });
  });
  const save = el('button', 'primary', 'Save');
  save.addEventListener('click', async () => {
    backdrop.remove();
    const goal = (goalSelect.value || null) as CommunicationGoal | null;
    if (goal !== step.goalOverride || instruction.value !== (step.stepInstruction ?? '')) {
      await controller.setStepGoal(tour.id, index, goal, instruction.value);
    }
    if (titleInput.value !== step.title || description.value !== step.description) {
      await controller.editStepContent(tour.id, index, {
        title: titleInput.value, description: description.value,
      });
    }
  });
  actions.append(cancel, regenerate, save);
  modal.append(goalRow, instruction, titleInput, description, actions);
  backdrop.appendChild(modal);
  document.body.appendChild(backdrop);
}

// -- sidebar -------------------------------------------------------------------

function stepSummary(step: TourStepDoc): string {
  if (step.kind === 'standalone') return step.stepInstruction ?? 'standalone step';
  const event = step.event!;
  if (event.type === 'markSelection') return `select in ${event.zoneId}`;
  if (event.type === 'widgetChange') return `${event.newValue.join(', ')} in ${event.zoneId}`;
  if (event.type === 'brush') return `brush in ${event.zoneId}`;
  return `clear in ${event.zoneId}`;
}

function recordBetweenButton(tour: TourDoc, position: number): HTMLElement {
  return button('●', 'Record new steps here', () => {
    void controller.startRecording({ goal: tour.metadata.goal }, {
      tourId: tour.id, position,
    });
  });
}

function insertStandaloneButton(tour: TourDoc, position: number): HTMLElement {
  return button('+', 'Add a step without an interaction', () => {
    const instruction = window.prompt('Instruction for the new step (e.g. "add a transition step here")');
    if (instruction) void controller.insertStandalone(tour.id, position, instruction);
  });
}

function tourCard(tour: TourDoc): HTMLElement {
  const card = el('section', 'tour-card');
  const head = el('header');
  head.appendChild(el('h3', undefined, tour.metadata.title ?? tour.id));
  const headActions = el('div', 'card-actions');
  headActions.append(
    button('▶', 'Play the whole tour', () => void controller.playAll(tour.id)),
    button('✎', 'Edit tour settings', () => {
      goalModal('Tour settings', 'Apply', (meta) => {
        void controller.saveTour({
          ...tour,
          metadata: {
            goal: meta.goal,
            instruction: meta.instruction ?? null,
            title: meta.title ?? tour.metadata.title,
          },
          revision: tour.revision + 1,
        });
      });
    }),
    button('↻', 'Regenerate all steps', () => void controller.regenerateTour(tour.id)),
    button('὚B', 'Save tour', () => {
      void controller.saveTour({ ...tour, revision: tour.revision + 1 });
    }),
    button('✕', 'Delete tour', () => {
      if (window.confirm(`Delete tour "${tour.metadata.title ?? tour.id}"?`)) {
        void controller.deleteTour(tour.id);
      }
    }),
  );
  head.appendChild(headActions);
  card.appendChild(head);

  const list = el('ol', 'step-list');
  card.appendChild(recordBetweenButton(tour, 0));
  card.appendChild(insertStandaloneButton(tour, 0));
  tour.steps.forEach((step, index) => {
    const item = el('li', step.stale ? 'step stale' : 'step');
    const label = el('div', 'step-label');
    label.appendChild(el('strong', undefined, step.title || `Step ${index + 1}`));
    label.appendChild(el('span', 'step-summary', stepSummary(step)));
    if (step.stale) label.appendChild(el('span', 'stale-badge', 'stale'));
    const actions = el('div', 'card-actions');
    actions.append(
      button('▷', 'Play this step', () => void controller.playStep(tour.id, index)),
      button('✎', 'Edit this step', () => stepEditModal(tour, index)),
      button('✕', 'Delete this step', () => void controller.deleteStepViaSave(tour.id, index)),
    );
    item.append(label, actions);
    list.appendChild(item);
    card.appendChild(list);
    card.appendChild(recordBetweenButton(tour, index + 1));
    card.appendChild(insertStandaloneButton(tour, index + 1));
  });
  return card;
}

function recordingPanel(): HTMLElement {
  const recording = controller.recording!;
  const panel = el('section', 'recording-panel');
  panel.appendChild(el('h3', undefined, recording.splice
    ? `Recording (insert at ${recording.splice.position})`
    : 'Recording…'));
  const list = el('ol', 'captured-list');
  for (const captured of recording.captured) {
    list.appendChild(el('li', undefined, captured.summary));
  }
  panel.appendChild(list);
  const stop = el('button', 'primary', 'Stop & create steps');
  stop.addEventListener('click', () => {
    if (recording.splice) void controller.stopRecordingAndSplice();
    else void controller.stopRecordingAndCreate();
  });
  const cancel = el('button', undefined, 'Cancel');
  cancel.addEventListener('click', () => controller.cancelRecording());
  panel.append(stop, cancel);
  return panel;
}

// -- top-level rendering ----------------------------------------------------------

const root = document.getElementById('app')!;
const sidebar = el('aside', 'sidebar');
const canvasWrap = el('main', 'canvas-wrap');
const canvas = el('div');
const overlayLayer = el('div', 'overlay-layer');
canvasWrap.append(canvas, overlayLayer);
root.append(sidebar, canvasWrap);

function onDashboardEvent(event: EventDoc): void {
  if (controller.recording) void controller.captureEvent(event);
}

function render(): void {
  const playing = controller.playback?.hideChrome ?? false;
  sidebar.style.display = playing ? 'none' : '';
  sidebar.textContent = '';

  if (!playing) {
    const head = el('div', 'sidebar-head');
    head.appendChild(el('h1', undefined, 'tourforge'));
    const record = el('button', 'primary record-button', '● Record');
    record.title = 'Record interactions for a new tour';
    record.disabled = !controller.dashboard || !!controller.recording;
    record.addEventListener('click', () => {
      goalModal('New tour', 'Start recording', (meta) => {
        void controller.startRecording(meta);
      });
    });
    head.appendChild(record);
    sidebar.appendChild(head);

    const picker = el('select', 'dashboard-picker');
    for (const dash of controller.dashboards) {
      const option = el('option', undefined, dash.title);
      option.setAttribute('value', dash.id);
      if (controller.dashboard?.id === dash.id) option.selected = true;
      picker.appendChild(option);
    }
    picker.addEventListener('change', () => void controller.openDashboard(picker.value));
    sidebar.appendChild(picker);

    if (controller.recording) sidebar.appendChild(recordingPanel());
    for (const tour of controller.tours) sidebar.appendChild(tourCard(tour));
  }

  if (controller.dashboard) {
    const scenes = buildScene(controller.dashboard, controller.viewState);
    renderDashboard(canvas, scenes, controller.dashboard.size, onDashboardEvent);
  }

  const frame = controller.currentFrame();
  overlayLayer.textContent = '';
  if (frame && controller.playback) {
    const playback = controller.playback;
    renderOverlay(overlayLayer, frame, playback.frames.length, {
      onNext: () => void controller.nextFrame(),
      onPrev: () => void controller.prevFrame(),
      onClose: () => controller.exitPlayback(),
      onDragEnd: (dx, dy) => void controller.dragOverlay(playback.tourId, frame.index, dx, dy),
    });
  }
}

controller.onChange(render);

async function boot(): Promise<void> {
  await controller.loadDashboards();
  const first = controller.dashboards[0];
  if (first) await controller.openDashboard(first.id);
  render();
}

void boot();
