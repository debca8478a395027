/** Payload schemas mirrored from the backend wire formats. */

export interface TensorInfo {
  T: number;
  N: number;
  labels: string[];
  alpha: number[];
  T_beta?: number;
  beta?: number[];
}

/** Mirrors the backend settings object exactly; unknown keys are rejected there. */
export interface SolveSettings {
  dim: number;
  lambda: number;
  variant: 'raw' | 'sammon' | 'elastic' | 'unfolding' | 'lmds';
  init: 'per-slice' | 'aggregated' | 'random';
  tol: number;
  max_outer: number;
  max_inner: number;
  seed: number;
  lmds_k?: number;
  lmds_w?: number | null;
  lmds_dinf?: number | null;
  groups?: unknown[];
}

export interface EmbeddingDoc {
  format_version: number;
  T: number;
  d: number;
  N: number;
  labels: string[];
  alpha: number[];
  beta?: number[];
  /** coords[slice][item][dim] */
  coords: number[][][];
  provenance: {
    settings: Record<string, unknown>;
    seed: number;
    cost_trace: number[];
    converged: boolean;
    stress_per_slice: number[];
  };
}

export interface MetricsDoc {
  total_cost: number;
  stress_per_slice: number[];
  roughness_per_curve: number[];
  instability: number[];
  labels: string[];
}

export class SchemaError extends Error {}

function fail(ctx: string, message: string): never {
  throw new SchemaError(`${ctx}: ${message}`);
}

function requireNumberArray(value: unknown, ctx: string, key: string, length?: number): number[] {
  if (!Array.isArray(value) || value.some((v) => typeof v !== 'number' || !isFinite(v))) {
    fail(ctx, `key '${key}' must be an array of finite numbers`);
  }
  const arr = value as number[];
  if (length !== undefined && arr.length !== length) {
    fail(ctx, `key '${key}' has length ${arr.length}, expected ${length}`);
  }
  return arr;
}

/** Validate an embedding payload; throws SchemaError with banner-ready text. */
export function validateEmbedding(doc: unknown): EmbeddingDoc {
  const ctx = 'embedding payload';
  if (typeof doc !== 'object' || doc === null) fail(ctx, 'not an object');
  const d = doc as Record<string, unknown>;
  if (d.format_version !== 1) fail(ctx, `unsupported format_version ${String(d.format_version)}`);
  for (const key of ['T', 'd', 'N'] as const) {
    if (typeof d[key] !== 'number') fail(ctx, `key '${key}' must be a number`);
  }
  const T = d.T as number;
  const N = d.N as number;
  const dim = d.d as number;
  if (!Array.isArray(d.labels) || d.labels.length !== N) fail(ctx, `'labels' must list ${N} names`);
  requireNumberArray(d.alpha, ctx, 'alpha');
  const coords = d.coords;
  if (!Array.isArray(coords) || coords.length !== T) fail(ctx, `'coords' must hold ${T} slices`);
  for (const slice of coords as unknown[]) {
    if (!Array.isArray(slice) || slice.length !== N) fail(ctx, `each slice must hold ${N} items`);
    for (const row of slice as unknown[]) {
      requireNumberArray(row, ctx, 'coords', dim);
    }
  }
  if (typeof d.provenance !== 'object' || d.provenance === null) fail(ctx, "missing 'provenance'");
  return doc as EmbeddingDoc;
}

/** Validate a metrics payload against its embedding. */
export function validateMetrics(doc: unknown, embedding: EmbeddingDoc): MetricsDoc {
  const ctx = 'metrics payload';
  if (typeof doc !== 'object' || doc === null) fail(ctx, 'not an object');
  const d = doc as Record<string, unknown>;
  if (typeof d.total_cost !== 'number') fail(ctx, "key 'total_cost' must be a number");
  requireNumberArray(d.stress_per_slice, ctx, 'stress_per_slice', embedding.T);
  requireNumberArray(d.roughness_per_curve, ctx, 'roughness_per_curve', embedding.N);
  requireNumberArray(d.instability, ctx, 'instability', embedding.N);
  return doc as MetricsDoc;
}
