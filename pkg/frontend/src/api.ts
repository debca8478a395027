/** Thin client for the solve service; fetch is injectable for tests. */

import { EmbeddingDoc, MetricsDoc, SolveSettings, TensorInfo, validateEmbedding, validateMetrics } from './types';

export interface HttpResponse {
  status: number;
  ok: boolean;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<HttpResponse>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function errorMessage(response: HttpResponse): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === 'string') return body.error;
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (globalThis.fetch as unknown) as FetchLike,
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const response = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response));
    }
    return response.json();
  }

  getTensor(): Promise<TensorInfo> {
    return this.request('GET', '/tensor') as Promise<TensorInfo>;
  }

  async postSolve(settings: SolveSettings): Promise<string> {
    const doc = (await this.request('POST', '/solve', settings)) as { job_id: string };
    return doc.job_id;
  }

  async getStatus(jobId: string): Promise<{ id: string; status: string; error?: string }> {
    return (await this.request('GET', `/status/${jobId}`)) as { id: string; status: string; error?: string };
  }

  async getEmbedding(jobId: string): Promise<EmbeddingDoc> {
    return validateEmbedding(await this.request('GET', `/embedding/${jobId}`));
  }

  async getMetrics(jobId: string, embedding: EmbeddingDoc): Promise<MetricsDoc> {
    return validateMetrics(await this.request('GET', `/metrics/${jobId}`), embedding);
  }
}
