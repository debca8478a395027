/** View state and its pure transitions.
 *
 * Every transition returns a fresh object, so a frame is a pure function
 * of (payloads, state) and replaying the same interactions reproduces the
 * same frames.
 */

import { SolveSettings } from './types';

export type PlotMode = 'curves-1d' | 'scatter-2d';

export interface OverlayToggles {
  stability: boolean;
  roughness: boolean;
  labels: boolean;
}

export interface ViewState {
  slice: number;
  mode: PlotMode;
  overlays: OverlayToggles;
  pending: SolveSettings;
  notice: string | null;
}

export const DEFAULT_SETTINGS: SolveSettings = {
  dim: 2,
  lambda: 1.0,
  variant: 'raw',
  init: 'aggregated',
  tol: 1e-6,
  max_outer: 100,
  max_inner: 50,
  seed: 0,
};

export function initialViewState(settings: SolveSettings = DEFAULT_SETTINGS): ViewState {
  return {
    slice: 0,
    mode: 'scatter-2d',
    overlays: { stability: false, roughness: false, labels: false },
    pending: { ...settings },
    notice: null,
  };
}

/** Clamp the requested slice into the grid bounds. */
export function setSlice(state: ViewState, slice: number, sliceCount: number): ViewState {
  const clamped = Math.min(Math.max(Math.round(slice), 0), sliceCount - 1);
  return { ...state, slice: clamped };
}

export function setMode(state: ViewState, mode: PlotMode): ViewState {
  return { ...state, mode };
}

export function toggleOverlay(state: ViewState, key: keyof OverlayToggles): ViewState {
  return { ...state, overlays: { ...state.overlays, [key]: !state.overlays[key] } };
}

export function setPending(state: ViewState, patch: Partial<SolveSettings>): ViewState {
  return { ...state, pending: { ...state.pending, ...patch } };
}

export function setNotice(state: ViewState, notice: string | null): ViewState {
  return { ...state, notice };
}
