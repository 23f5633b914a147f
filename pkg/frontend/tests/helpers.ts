/**
 * Test support: spawning the real backend, a node:http transport matching
 * the client's fetch interface, traffic recording, and DOM readers.
 */

import { spawn, type ChildProcess } from 'node:child_process';
import http from 'node:http';
import net from 'node:net';
import path from 'node:path';
import { fileURLToPath } from 'node:url';

import type { FetchLike, FetchResponseLike } from '../src/api.js';

const HERE = path.dirname(fileURLToPath(import.meta.url));
export const FIXTURES = path.resolve(HERE, '../../src/plconf/fixtures');

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.listen(0, '127.0.0.1', () => {
      const address = server.address();
      if (address === null || typeof address === 'string') {
        reject(new Error('no port assigned'));
        return;
      }
      server.close(() => resolve(address.port));
    });
    server.on('error', reject);
  });
}

/** fetch-shaped transport over node:http; json() may be called repeatedly. */
export const httpFetch: FetchLike = (url, init) =>
  new Promise<FetchResponseLike>((resolve, reject) => {
    const request = http.request(
      url,
      { method: init?.method ?? 'GET', headers: init?.headers ?? {} },
      (response) => {
        const chunks: Buffer[] = [];
        response.on('data', (chunk: Buffer) => chunks.push(chunk));
        response.on('end', () => {
          const text = Buffer.concat(chunks).toString('utf-8');
          const status = response.statusCode ?? 0;
          resolve({
            status,
            ok: status >= 200 && status < 300,
            json: async () => JSON.parse(text) as unknown,
          });
        });
      },
    );
    request.on('error', reject);
    if (init?.body !== undefined) request.write(init.body);
    request.end();
  });

export interface RecordedCall {
  method: string;
  url: string;
  status: number;
  payload: unknown;
}

/** Wrap a transport so every exchange is captured for later replay. */
export function recordingFetch(inner: FetchLike): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const response = await inner(url, init);
    const payload = await response.json().catch(() => undefined);
    calls.push({ method: init?.method ?? 'GET', url, status: response.status, payload });
    return {
      status: response.status,
      ok: response.ok,
      json: async () => {
        if (payload === undefined) throw new Error('response body was not JSON');
        return payload;
      },
    };
  };
  return { fetchFn, calls };
}

export interface StateEntry {
  state: string;
  provenance: string | null;
}

/**
 * Replay recorded traffic into the per-feature map a faithful thin client
 * must display: full session fetches replace the map, accepted mutations
 * overlay their echo and delta, failed calls change nothing.  Comparing
 * this against the DOM proves no state was computed client-side.
 */
export function statesFromTraffic(calls: RecordedCall[]): Record<string, StateEntry> {
  let map: Record<string, StateEntry> = {};
  for (const call of calls) {
    if (call.status < 200 || call.status >= 300) continue;
    const payload = call.payload as {
      states?: Record<string, StateEntry>;
      feature?: string;
      choice?: string;
      derived?: { feature: string; state: string; provenance: string | null }[];
    };
    if (call.method === 'GET' && /\/sessions\/[^/]+$/.test(call.url)) {
      map = {};
      for (const [fid, entry] of Object.entries(payload.states ?? {})) {
        map[fid] = { state: entry.state, provenance: entry.provenance };
      }
    } else if (call.method === 'POST' && call.url.endsWith('/decisions')) {
      if (payload.feature !== undefined && payload.choice !== undefined) {
        map[payload.feature] = { state: payload.choice, provenance: 'user' };
      }
      for (const entry of payload.derived ?? []) {
        map[entry.feature] = { state: entry.state, provenance: entry.provenance };
      }
    } else if (call.method === 'POST' && call.url.endsWith('/apply')) {
      for (const entry of payload.derived ?? []) {
        map[entry.feature] = { state: entry.state, provenance: entry.provenance };
      }
    }
  }
  return map;
}

export interface RunningService {
  baseUrl: string;
  stop(): Promise<void>;
}

export async function startService(
  options: { model?: string; catalog?: string; extraArgs?: string[] } = {},
): Promise<RunningService> {
  const port = await freePort();
  const model = options.model ?? path.join(FIXTURES, 'dell.fm');
  const catalog = options.catalog ?? path.join(FIXTURES, 'dell.catalog');
  const child = spawn(
    'python3',
    [
      '-m',
      'plconf',
      'serve',
      '--model',
      model,
      '--catalog',
      catalog,
      '--port',
      String(port),
      ...(options.extraArgs ?? []),
    ],
    { stdio: ['ignore', 'ignore', 'pipe'] },
  );
  let stderr = '';
  child.stderr?.on('data', (chunk: Buffer) => {
    stderr += chunk.toString();
  });

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service exited with ${child.exitCode} before becoming ready:\n${stderr}`);
    }
    try {
      const probe = await httpFetch(`${baseUrl}/model`);
      if (probe.ok) break;
    } catch {
      // Not listening yet.
    }
    if (Date.now() > deadline) {
      child.kill('SIGKILL');
      throw new Error(`service did not become ready within 30s:\n${stderr}`);
    }
    await sleep(150);
  }
  return { baseUrl, stop: () => stopProcess(child) };
}

async function stopProcess(child: ChildProcess): Promise<void> {
  if (child.exitCode !== null) return;
  const exited = new Promise<void>((resolve) => child.once('exit', () => resolve()));
  child.kill('SIGTERM');
  await Promise.race([exited, sleep(5_000)]);
  if (child.exitCode === null) {
    child.kill('SIGKILL');
    await exited;
  }
}

// ---------------------------------------------------------------- DOM readers

export function mountRoot(): HTMLElement {
  const root = document.createElement('div');
  document.body.appendChild(root);
  return root;
}

export function featureNode(root: HTMLElement, featureId: string): HTMLElement {
  // Feature ids never contain quotes or backslashes, so plain interpolation
  // inside a quoted attribute selector is safe.
  const node = root.querySelector<HTMLElement>(`[data-feature="${featureId}"]`);
  if (node === null) throw new Error(`no rendered node for feature ${featureId}`);
  return node;
}

export function domStates(root: HTMLElement): Record<string, StateEntry> {
  const out: Record<string, StateEntry> = {};
  for (const el of root.querySelectorAll<HTMLElement>('[data-feature]')) {
    out[el.dataset['feature'] ?? ''] = {
      state: el.dataset['state'] ?? '',
      provenance: el.dataset['provenance'] ?? null,
    };
  }
  return out;
}

export function selectedFeatures(root: HTMLElement): Set<string> {
  const out = new Set<string>();
  for (const [fid, entry] of Object.entries(domStates(root))) {
    if (entry.state === 'selected') out.add(fid);
  }
  return out;
}

export function statusText(root: HTMLElement): string | null {
  return root.querySelector('.status')?.textContent ?? null;
}

export function banner(root: HTMLElement): HTMLElement | null {
  return root.querySelector<HTMLElement>('.banner');
}

export function violationTexts(root: HTMLElement): string[] {
  return [...root.querySelectorAll('.violation')].map((el) => el.textContent ?? '');
}

export function clickControl(root: HTMLElement, featureId: string, control: string): void {
  const button = featureNode(root, featureId).querySelector<HTMLButtonElement>(`.${control}`);
  if (button === null) throw new Error(`feature ${featureId} has no ${control} button`);
  button.click();
}
