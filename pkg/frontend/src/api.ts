/**
 * Typed client for the configurator HTTP service.  Methods resolve with the
 * parsed JSON payload or reject with ServiceError (non-2xx, carrying the
 * server's body) or ServiceUnreachableError (the request never completed).
 */

import type {
  ApplyAcceptedDoc,
  DecisionAcceptedDoc,
  DecisionValue,
  ModelDoc,
  RecommendationsDoc,
  RetractAcceptedDoc,
  SessionCreatedDoc,
  SessionDoc,
} from './types.js';

// Structural subset of fetch, so tests can substitute their own transport.
export interface FetchResponseLike {
  status: number;
  ok: boolean;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponseLike>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly body: Record<string, unknown>,
    message: string,
  ) {
    super(message);
    this.name = 'ServiceError';
  }
}

export class ServiceUnreachableError extends Error {
  constructor(readonly cause_: unknown) {
    super('service unreachable');
    this.name = 'ServiceUnreachableError';
  }
}

export class MalformedPayloadError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'MalformedPayloadError';
  }
}

function checkModelDoc(doc: unknown): ModelDoc {
  const m = doc as ModelDoc;
  if (
    !m ||
    typeof m.root !== 'string' ||
    !Array.isArray(m.features) ||
    !Array.isArray(m.groups) ||
    !Array.isArray(m.facets) ||
    m.features.some((f) => typeof f?.id !== 'string' || typeof f?.variability !== 'string')
  ) {
    throw new MalformedPayloadError('model payload is missing required fields');
  }
  return m;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  async model(): Promise<ModelDoc> {
    return checkModelDoc(await this.request('GET', '/model'));
  }

  async createSession(): Promise<SessionCreatedDoc> {
    return (await this.request('POST', '/sessions')) as SessionCreatedDoc;
  }

  async session(sessionId: string): Promise<SessionDoc> {
    return (await this.request('GET', `/sessions/${sessionId}`)) as SessionDoc;
  }

  async decide(
    sessionId: string,
    feature: string,
    choice: DecisionValue,
  ): Promise<DecisionAcceptedDoc> {
    const body = JSON.stringify({ feature, choice });
    return (await this.request(
      'POST',
      `/sessions/${sessionId}/decisions`,
      body,
    )) as DecisionAcceptedDoc;
  }

  async retract(sessionId: string, feature: string): Promise<RetractAcceptedDoc> {
    return (await this.request(
      'DELETE',
      `/sessions/${sessionId}/decisions/${feature}`,
    )) as RetractAcceptedDoc;
  }

  async recommendations(sessionId: string, k?: number): Promise<RecommendationsDoc> {
    const query = k === undefined ? '' : `?k=${k}`;
    return (await this.request(
      'GET',
      `/sessions/${sessionId}/recommendations${query}`,
    )) as RecommendationsDoc;
  }

  async apply(sessionId: string, configId: string): Promise<ApplyAcceptedDoc> {
    const body = JSON.stringify({ config_id: configId });
    return (await this.request('POST', `/sessions/${sessionId}/apply`, body)) as ApplyAcceptedDoc;
  }

  private async request(method: string, path: string, body?: string): Promise<unknown> {
    let response: FetchResponseLike;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
        body,
      });
    } catch (err) {
      throw new ServiceUnreachableError(err);
    }

    let payload: unknown;
    try {
      payload = await response.json();
    } catch (err) {
      if (!response.ok) {
        throw new ServiceError(response.status, {}, `HTTP ${response.status}`);
      }
      throw new MalformedPayloadError('response body is not JSON');
    }

    if (!response.ok) {
      const record = (payload ?? {}) as Record<string, unknown>;
      const detail = typeof record['error'] === 'string' ? record['error'] : `HTTP ${response.status}`;
      throw new ServiceError(response.status, record, detail);
    }
    return payload;
  }
}
