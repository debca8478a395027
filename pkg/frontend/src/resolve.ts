/** The re-solve loop: post settings, poll status, swap in the result.
 *
 * A busy backend (409) or a network failure surfaces as a notice and
 * leaves the current payloads untouched; rejected settings (400) go to a
 * separate callback so the form can highlight them.
 */

import { ApiClient, ApiError } from './api';
import { EmbeddingDoc, MetricsDoc, SchemaError, SolveSettings } from './types';

export const POLL_INTERVAL_MS = 500;

export interface ResolveCallbacks {
  onNotice(text: string): void;
  onSettingsRejected(message: string): void;
  onResult(embedding: EmbeddingDoc, metrics: MetricsDoc): void;
}

export type Sleep = (ms: number) => Promise<void>;

const defaultSleep: Sleep = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

/** Returns true when a new embedding was swapped in. */
export async function requestResolve(
  api: ApiClient,
  settings: SolveSettings,
  callbacks: ResolveCallbacks,
  sleep: Sleep = defaultSleep,
): Promise<boolean> {
  let jobId: string;
  try {
    jobId = await api.postSolve(settings);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      callbacks.onNotice('solver busy: a job is already running');
      return false;
    }
    if (err instanceof ApiError && err.status === 400) {
      callbacks.onSettingsRejected(err.message);
      return false;
    }
    callbacks.onNotice(`solve request failed (${String(err)}); retry when the backend is reachable`);
    return false;
  }

  try {
    for (;;) {
      const status = await api.getStatus(jobId);
      if (status.status === 'done') break;
      if (status.status === 'failed') {
        callbacks.onNotice(`solve failed: ${status.error ?? 'unknown error'}`);
        return false;
      }
      await sleep(POLL_INTERVAL_MS);
    }
    const embedding = await api.getEmbedding(jobId);
    const metrics = await api.getMetrics(jobId, embedding);
    callbacks.onResult(embedding, metrics);
    return true;
  } catch (err) {
    if (err instanceof SchemaError) {
      callbacks.onNotice(err.message);
    } else {
      callbacks.onNotice(`lost the job while polling (${String(err)}); retry to start over`);
    }
    return false;
  }
}
