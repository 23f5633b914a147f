/**
 * View state container.  Every decision state, provenance, status, and
 * recommendation held here was lifted verbatim from a service payload; the
 * store never derives a value the server did not send.
 */

import type {
  DerivedEntry,
  FeatureStateDoc,
  RecommendationDoc,
  SessionDoc,
  SessionStatus,
  ViolationDoc,
} from './types.js';

export interface Banner {
  kind: 'error' | 'conflict';
  text: string;
  violations: ViolationDoc[];
}

export interface ViewState {
  sessionId: string | null;
  status: SessionStatus | null;
  facet: string | null;
  states: Record<string, FeatureStateDoc>;
  suggested: string | null;
  banner: Banner | null;
  // null = panel closed; [] = fetched and empty
  recommendations: RecommendationDoc[] | null;
  // Features touched by the most recent payload, for change animation.
  lastChanged: string[];
}

type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = {
    sessionId: null,
    status: null,
    facet: null,
    states: {},
    suggested: null,
    banner: null,
    recommendations: null,
    lastChanged: [],
  };
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  set(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const fn of this.listeners) fn(this.state);
  }

  /** Replace the whole per-feature map from a full session document. */
  loadSession(doc: SessionDoc, changed: string[] = []): void {
    const states: Record<string, FeatureStateDoc> = {};
    for (const [fid, entry] of Object.entries(doc.states)) {
      states[fid] = { state: entry.state, provenance: entry.provenance };
    }
    this.set({
      sessionId: doc.session_id,
      status: doc.status,
      facet: doc.facet,
      states,
      suggested: doc.suggested,
      banner: null,
      lastChanged: changed,
    });
  }

  /** Overlay the delta a mutation returned onto the current map. */
  applyDelta(
    entries: DerivedEntry[],
    status: SessionStatus,
    suggested: string | null,
    decided?: { feature: string; state: FeatureStateDoc },
  ): void {
    const states = { ...this.state.states };
    const changed: string[] = [];
    if (decided !== undefined) {
      states[decided.feature] = decided.state;
      changed.push(decided.feature);
    }
    for (const entry of entries) {
      states[entry.feature] = { state: entry.state, provenance: entry.provenance };
      changed.push(entry.feature);
    }
    this.set({ states, status, suggested, banner: null, lastChanged: changed });
  }
}
