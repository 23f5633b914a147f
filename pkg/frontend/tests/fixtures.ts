/**
 * Canned service payloads for unit tests.  The sample line is a small media
 * player, unrelated to the shipped fixtures, to show nothing is hard-wired
 * to a particular model.
 */

import type { FetchLike, FetchResponseLike } from '../src/api.js';
import type { ModelDoc, SessionDoc } from '../src/types.js';

export function jsonResponse(status: number, payload: unknown): FetchResponseLike {
  return { status, ok: status >= 200 && status < 300, json: async () => payload };
}

export function sampleModel(): ModelDoc {
  return {
    root: 'Player',
    features: [
      { id: 'Player', parent: null, variability: 'root', attributes: [] },
      { id: 'Codecs', parent: 'Player', variability: 'mandatory', attributes: [] },
      { id: 'MP3', parent: 'Codecs', variability: 'grouped', attributes: [] },
      { id: 'FLAC', parent: 'Codecs', variability: 'grouped', attributes: [] },
      { id: 'Skins', parent: 'Player', variability: 'optional', attributes: [] },
      { id: 'Visualizer', parent: 'Player', variability: 'optional', attributes: [] },
    ],
    groups: [{ parent: 'Codecs', lower: 1, upper: 2, members: ['MP3', 'FLAC'] }],
    cross_constraints: [{ kind: 'requires', a: 'Visualizer', b: 'Skins' }],
    facets: [{ name: 'sound', members: ['MP3', 'FLAC'] }],
  };
}

export function sampleSession(overrides: Partial<SessionDoc> = {}): SessionDoc {
  return {
    session_id: 's1',
    status: 'open',
    facet: 'sound',
    states: {
      Player: { state: 'selected', provenance: 'root' },
      Codecs: { state: 'selected', provenance: 'propagated' },
      MP3: { state: 'undecided', provenance: null },
      FLAC: { state: 'undecided', provenance: null },
      Skins: { state: 'undecided', provenance: null },
      Visualizer: { state: 'undecided', provenance: null },
    },
    suggested: 'MP3',
    ...overrides,
  };
}

export interface ScriptedRoute {
  method: string;
  path: string;
  status: number;
  payload: unknown;
  /** Consumed at most this many times; omit for unlimited. */
  times?: number;
}

/**
 * Transport answering from a route table; first matching live route wins.
 * Every exchange is appended to `log` as "METHOD path".
 */
export function scriptedFetch(routes: ScriptedRoute[]): { fetchFn: FetchLike; log: string[] } {
  const log: string[] = [];
  const remaining = routes.map((route) => ({ ...route, left: route.times ?? Infinity }));
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    log.push(`${method} ${path}`);
    for (const route of remaining) {
      if (route.left > 0 && route.method === method && route.path === path) {
        route.left -= 1;
        return jsonResponse(route.status, route.payload);
      }
    }
    throw new Error(`no scripted route for ${method} ${path}`);
  };
  return { fetchFn, log };
}
