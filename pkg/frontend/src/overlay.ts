/**
 * The step overlay: a draggable pop-up anchored in dashboard space with
 * forward/back controls. Drags report their total delta on release so the
 * controller can persist the step's overlay offset.
 */
import type { FrameDoc } from './types.js';

export interface OverlayCallbacks {
  onNext(): void;
  onPrev(): void;
  onClose(): void;
  onDragEnd(dx: number, dy: number): void;
}

export function renderOverlay(layer: HTMLElement, frame: FrameDoc,
                              total: number, cb: OverlayCallbacks): HTMLElement {
  layer.textContent = '';
  const box = document.createElement('div');
  box.className = 'overlay';
  box.style.left = `${frame.anchor.x}px`;
  box.style.top = `${frame.anchor.y}px`;

  const title = document.createElement('h3');
  title.textContent = frame.title || `Step ${frame.index + 1}`;
  const body = document.createElement('p');
  body.textContent = frame.description;

  const nav = document.createElement('div');
  nav.className = 'overlay-nav';
  const prev = document.createElement('button');
  prev.textContent = '◀';
  prev.disabled = frame.index === 0;
  prev.addEventListener('click', cb.onPrev);
  const counter = document.createElement('span');
  counter.textContent = `${frame.index + 1} / ${total}`;
  const next = document.createElement('button');
  next.textContent = '▶';
  next.disabled = frame.index + 1 >= total;
  next.addEventListener('click', cb.onNext);
  const close = document.createElement('button');
  close.textContent = '✕';
  close.className = 'overlay-close';
  close.addEventListener('click', cb.onClose);
  nav.append(prev, counter, next, close);

  box.append(title, body, nav);
  layer.appendChild(box);

  // drag to move; the accumulated delta persists via the controller
  let start: { x: number; y: number } | null = null;
  let moved = { dx: 0, dy: 0 };
  box.addEventListener('pointerdown', (event) => {
    if ((event.target as HTMLElement).tagName === 'BUTTON') return;
    start = { x: event.clientX, y: event.clientY };
    moved = { dx: 0, dy: 0 };
    box.setPointerCapture(event.pointerId);
  });
  box.addEventListener('pointermove', (event) => {
    if (!start) return;
    moved = { dx: event.clientX - start.x, dy: event.clientY - start.y };
    box.style.left = `${frame.anchor.x + moved.dx}px`;
    box.style.top = `${frame.anchor.y + moved.dy}px`;
  });
  box.addEventListener('pointerup', () => {
    if (start && (moved.dx !== 0 || moved.dy !== 0)) cb.onDragEnd(moved.dx, moved.dy);
    start = null;
  });
  return box;
}
