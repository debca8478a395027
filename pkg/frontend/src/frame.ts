/** Pure frame construction: (payloads, view state) -> list of draw ops.
 *
 * Rendering is split from painting so frames can be asserted in tests;
 * the canvas adapter just replays the ops.
 */

import { roughnessColor, stabilityArrows } from './overlays';
import { Bounds, globalBounds, linearScale, padded, Scale } from './scales';
import { EmbeddingDoc, MetricsDoc } from './types';
import { ViewState } from './state';

export type FrameOp =
  | { kind: 'point'; x: number; y: number; radius: number; color: string; item: number }
  | { kind: 'polyline'; points: Array<[number, number]>; color: string; item: number }
  | { kind: 'arrow'; from: [number, number]; to: [number, number]; color: string; item: number }
  | { kind: 'label'; x: number; y: number; text: string; item: number }
  | { kind: 'marker'; x: number; color: string }
  | { kind: 'notice'; text: string };

export interface Frame {
  width: number;
  height: number;
  slice: number;
  ops: FrameOp[];
}

export interface FrameSize {
  width: number;
  height: number;
}

const MARGIN = 28;
const POINT_COLOR = '#3566a8';

function itemColors(embedding: EmbeddingDoc, metrics: MetricsDoc | null, useRoughness: boolean): string[] {
  const n = embedding.N;
  if (!useRoughness || metrics === null) {
    return new Array<string>(n).fill(POINT_COLOR);
  }
  const rough = metrics.roughness_per_curve;
  const min = Math.min(...rough);
  const max = Math.max(...rough);
  return rough.map((r) => roughnessColor(r, min, max));
}

function scatterScales(bounds: Bounds, size: FrameSize): { sx: Scale; sy: Scale } {
  const [x0, x1] = padded(bounds.min[0], bounds.max[0]);
  const dim = bounds.min.length;
  const [y0, y1] = dim > 1 ? padded(bounds.min[1], bounds.max[1]) : [-1, 1];
  return {
    sx: linearScale(x0, x1, MARGIN, size.width - MARGIN),
    // canvas y grows downward
    sy: linearScale(y0, y1, size.height - MARGIN, MARGIN),
  };
}

function scatterFrame(
  embedding: EmbeddingDoc,
  metrics: MetricsDoc | null,
  view: ViewState,
  size: FrameSize,
): FrameOp[] {
  const ops: FrameOp[] = [];
  if (embedding.d > 2) {
    ops.push({ kind: 'notice', text: `showing the first two of ${embedding.d} dimensions` });
  }
  const bounds = globalBounds(embedding.coords);
  const { sx, sy } = scatterScales(bounds, size);
  const colors = itemColors(embedding, metrics, view.overlays.roughness);
  const slice = embedding.coords[view.slice];
  const yOf = (row: number[]) => (embedding.d > 1 ? row[1] : 0);

  for (let i = 0; i < slice.length; i++) {
    ops.push({ kind: 'point', x: sx(slice[i][0]), y: sy(yOf(slice[i])), radius: 3, color: colors[i], item: i });
    if (view.overlays.labels) {
      ops.push({ kind: 'label', x: sx(slice[i][0]) + 5, y: sy(yOf(slice[i])) - 5, text: embedding.labels[i], item: i });
    }
  }
  if (view.overlays.stability) {
    for (const arrow of stabilityArrows(embedding.coords, view.slice)) {
      ops.push({
        kind: 'arrow',
        from: [sx(arrow.from[0]), sy(yOf(arrow.from))],
        to: [sx(arrow.to[0]), sy(yOf(arrow.to))],
        color: '#777777',
        item: arrow.item,
      });
    }
  }
  return ops;
}

function curvesFrame(
  embedding: EmbeddingDoc,
  metrics: MetricsDoc | null,
  view: ViewState,
  size: FrameSize,
): FrameOp[] {
  const ops: FrameOp[] = [];
  if (embedding.d > 1) {
    ops.push({ kind: 'notice', text: `curves show dimension 1 of ${embedding.d}` });
  }
  const bounds = globalBounds(embedding.coords);
  const [y0, y1] = padded(bounds.min[0], bounds.max[0]);
  const sx = linearScale(0, embedding.T - 1 || 1, MARGIN, size.width - MARGIN);
  const sy = linearScale(y0, y1, size.height - MARGIN, MARGIN);
  const colors = itemColors(embedding, metrics, view.overlays.roughness);

  for (let i = 0; i < embedding.N; i++) {
    const points: Array<[number, number]> = [];
    for (let k = 0; k < embedding.T; k++) {
      points.push([sx(k), sy(embedding.coords[k][i][0])]);
    }
    ops.push({ kind: 'polyline', points, color: colors[i], item: i });
    if (view.overlays.labels) {
      const last = points[points.length - 1];
      ops.push({ kind: 'label', x: last[0] + 4, y: last[1], text: embedding.labels[i], item: i });
    }
  }
  ops.push({ kind: 'marker', x: sx(view.slice), color: '#bbbbbb' });
  return ops;
}

/** Build the complete frame for the current payloads and view state. */
export function renderFrame(
  embedding: EmbeddingDoc,
  metrics: MetricsDoc | null,
  view: ViewState,
  size: FrameSize = { width: 640, height: 480 },
): Frame {
  const ops = view.mode === 'scatter-2d'
    ? scatterFrame(embedding, metrics, view, size)
    : curvesFrame(embedding, metrics, view, size);
  if (view.notice !== null) {
    ops.push({ kind: 'notice', text: view.notice });
  }
  return { width: size.width, height: size.height, slice: view.slice, ops };
}
