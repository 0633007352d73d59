/**
 * DOM layer: draws a scene as SVG plus HTML widgets and forwards semantic
 * events to a callback. Pixel geometry never leaves this file.
 */
import type { EventDoc } from './types.js';
import type { ChartScene, StaticScene, WidgetScene, ZoneScene } from './scene.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export type EventSink = (event: EventDoc) => void;

function svg<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

function drawChart(root: SVGSVGElement, scene: ChartScene, emit: EventSink): void {
  const { zone } = scene;
  root.appendChild(svg('rect', {
    x: zone.bounds.x, y: zone.bounds.y, width: zone.bounds.w, height: zone.bounds.h,
    class: 'zone-frame',
  }));
  const title = svg('text', {
    x: zone.bounds.x + 6, y: zone.bounds.y + 14, class: 'zone-title',
  });
  title.textContent = zone.worksheetName;
  title.addEventListener('dblclick', () => emit(scene.clearEvent));
  root.appendChild(title);

  if (scene.path && scene.path.length > 1) {
    root.appendChild(svg('polyline', {
      points: scene.path.map((p) => `${p.x},${p.y}`).join(' '),
      class: 'line-path',
    }));
  }
  for (const mark of scene.marks) {
    const node = mark.shape === 'rect'
      ? svg('rect', { x: mark.x, y: mark.y, width: mark.w, height: mark.h })
      : svg('circle', { cx: mark.x, cy: mark.y, r: mark.w / 2 });
    node.setAttribute('class', mark.highlighted ? 'mark highlighted' : 'mark');
    node.setAttribute('data-zone', mark.zoneId);
    node.setAttribute('data-key', mark.key);
    const tip = svg('title', {});
    tip.textContent = mark.label;
    node.appendChild(tip);
    node.addEventListener('click', () => emit(mark.event));
    root.appendChild(node);
  }
}

function drawStatic(root: SVGSVGElement, scene: StaticScene): void {
  const { zone } = scene;
  root.appendChild(svg('rect', {
    x: zone.bounds.x, y: zone.bounds.y, width: zone.bounds.w, height: zone.bounds.h,
    class: scene.kind === 'text' ? 'zone-text' : 'zone-image',
  }));
  const text = svg('text', {
    x: zone.bounds.x + 8, y: zone.bounds.y + zone.bounds.h / 2 + 4,
    class: 'static-content',
  });
  text.textContent = scene.content;
  root.appendChild(text);
}

function widgetControl(scene: WidgetScene, emit: EventSink): HTMLElement {
  const { zone } = scene;
  const wrap = document.createElement('div');
  wrap.className = 'widget';
  wrap.style.left = `${zone.bounds.x}px`;
  wrap.style.top = `${zone.bounds.y}px`;
  wrap.style.width = `${zone.bounds.w}px`;
  wrap.dataset.zone = zone.id;

  const label = document.createElement('label');
  label.textContent = zone.label;
  wrap.appendChild(label);

  if (zone.widgetKind === 'dropdown') {
    const select = document.createElement('select');
    for (const option of zone.options) {
      const el = document.createElement('option');
      el.value = option;
      el.textContent = option;
      el.selected = scene.selected.includes(option);
      select.appendChild(el);
    }
    select.addEventListener('change', () => emit(scene.eventFor([select.value])));
    wrap.appendChild(select);
  } else if (zone.widgetKind === 'button') {
    const button = document.createElement('button');
    button.textContent = zone.options[0] ?? zone.label;
    button.addEventListener('click', () => emit(scene.eventFor([zone.options[0]!])));
    wrap.appendChild(button);
  } else {
    const type = zone.widgetKind === 'radio' ? 'radio' : 'checkbox';
    for (const option of zone.options) {
      const item = document.createElement('label');
      item.className = 'widget-option';
      const input = document.createElement('input');
      input.type = type;
      input.name = zone.id;
      input.value = option;
      input.checked = scene.selected.includes(option);
      input.addEventListener('change', () => {
        if (type === 'radio') emit(scene.eventFor([option]));
        else {
          const checked = [...wrap.querySelectorAll<HTMLInputElement>('input:checked')]
            .map((el) => el.value);
          emit(scene.eventFor(checked));
        }
      });
      item.appendChild(input);
      item.append(option);
      wrap.appendChild(item);
    }
  }
  return wrap;
}

export interface RenderedDashboard {
  svg: SVGSVGElement;
  widgetLayer: HTMLElement;
}

export function renderDashboard(container: HTMLElement, scenes: ZoneScene[],
                                size: { width: number; height: number },
                                emit: EventSink): RenderedDashboard {
  container.textContent = '';
  container.classList.add('dashboard');
  container.style.width = `${size.width}px`;
  container.style.height = `${size.height}px`;

  const root = svg('svg', {
    width: size.width, height: size.height,
    viewBox: `0 0 ${size.width} ${size.height}`,
  });
  const widgetLayer = document.createElement('div');
  widgetLayer.className = 'widget-layer';

  for (const scene of scenes) {
    if (scene.kind === 'chart') drawChart(root, scene, emit);
    else if (scene.kind === 'widget') widgetLayer.appendChild(widgetControl(scene, emit));
    else drawStatic(root, scene);
  }
  container.appendChild(root);
  container.appendChild(widgetLayer);
  return { svg: root, widgetLayer };
}
