/** DOM wiring: controls on the left, one canvas on the right.
 *
 * The backend address defaults to the local solve service; start it with
 * `contmds serve --input tensor.json --port 8631`.
 */

import { ApiClient } from './api';
import { paint } from './canvas';
import { renderFrame } from './frame';
import {
  initialViewState,
  setMode,
  setNotice,
  setPending,
  setSlice,
  toggleOverlay,
  PlotMode,
  ViewState,
} from './state';
import { requestResolve } from './resolve';
import { EmbeddingDoc, MetricsDoc } from './types';

const BACKEND = (window as unknown as { CONTMDS_BACKEND?: string }).CONTMDS_BACKEND
  ?? 'http://127.0.0.1:8631';

interface App {
  view: ViewState;
  embedding: EmbeddingDoc | null;
  metrics: MetricsDoc | null;
  solving: boolean;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function draw(app: App): void {
  const canvas = el<HTMLCanvasElement>('plot');
  const banner = el<HTMLDivElement>('banner');
  banner.textContent = app.view.notice ?? '';
  banner.style.display = app.view.notice ? 'block' : 'none';
  if (app.embedding === null) return;
  const ctx = canvas.getContext('2d');
  if (ctx === null) return;
  const frame = renderFrame(app.embedding, app.metrics, app.view, {
    width: canvas.width,
    height: canvas.height,
  });
  paint(frame, ctx);
  el<HTMLSpanElement>('slice-readout').textContent =
    `slice ${app.view.slice} (alpha = ${app.embedding.alpha[app.view.slice % app.embedding.alpha.length]})`;
  if (app.metrics !== null) {
    const rough = app.metrics.roughness_per_curve;
    el<HTMLSpanElement>('metrics-readout').textContent =
      `total cost ${app.metrics.total_cost.toPrecision(6)}, max roughness ${Math.max(...rough).toPrecision(4)}`;
  }
}

function wire(): void {
  const app: App = { view: initialViewState(), embedding: null, metrics: null, solving: false };
  const api = new ApiClient(BACKEND);

  const slider = el<HTMLInputElement>('slice');
  slider.addEventListener('input', () => {
    if (app.embedding === null) return;
    app.view = setSlice(app.view, Number(slider.value), app.embedding.T);
    draw(app);
  });

  el<HTMLSelectElement>('mode').addEventListener('change', (ev) => {
    app.view = setMode(app.view, (ev.target as HTMLSelectElement).value as PlotMode);
    draw(app);
  });

  for (const key of ['stability', 'roughness', 'labels'] as const) {
    el<HTMLInputElement>(`overlay-${key}`).addEventListener('change', () => {
      app.view = toggleOverlay(app.view, key);
      draw(app);
    });
  }

  for (const [id, key] of [['lambda', 'lambda'], ['dim', 'dim'], ['seed', 'seed']] as const) {
    el<HTMLInputElement>(id).addEventListener('change', (ev) => {
      const value = Number((ev.target as HTMLInputElement).value);
      app.view = setPending(app.view, { [key]: value });
    });
  }
  el<HTMLSelectElement>('variant').addEventListener('change', (ev) => {
    app.view = setPending(app.view, {
      variant: (ev.target as HTMLSelectElement).value as never,
    });
  });

  el<HTMLButtonElement>('solve').addEventListener('click', () => {
    if (app.solving) {
      app.view = setNotice(app.view, 'a solve request is already in flight');
      draw(app);
      return;
    }
    app.solving = true;
    app.view = setNotice(app.view, 'solving...');
    draw(app);
    void requestResolve(api, app.view.pending, {
      onNotice: (text) => {
        app.view = setNotice(app.view, text);
        draw(app);
      },
      onSettingsRejected: (message) => {
        app.view = setNotice(app.view, `settings rejected: ${message}`);
        el<HTMLInputElement>('lambda').classList.add('rejected');
        draw(app);
      },
      onResult: (embedding, metrics) => {
        app.embedding = embedding;
        app.metrics = metrics;
        app.view = setNotice(app.view, null);
        app.view = setSlice(app.view, app.view.slice, embedding.T);
        slider.max = String(embedding.T - 1);
        el<HTMLInputElement>('lambda').classList.remove('rejected');
        draw(app);
      },
    }).finally(() => {
      app.solving = false;
    });
  });

  api
    .getTensor()
    .then((info) => {
      slider.max = String(info.T - 1);
      app.view = setNotice(app.view, `loaded tensor: ${info.N} items, ${info.T} slices; press solve`);
      draw(app);
    })
    .catch((err) => {
      app.view = setNotice(app.view, `backend unreachable at ${BACKEND}: ${String(err)}`);
      draw(app);
    });
}

window.addEventListener('DOMContentLoaded', wire);
