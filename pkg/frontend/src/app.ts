/**
 * Session screen: wires the HTTP client, the view-state store, and the
 * renderers together.  All mutations go to the service first; the DOM is
 * updated only from what comes back (response deltas, or a full session
 * re-fetch where a retraction may have unwound earlier propagation).
 */

import {
  ApiClient,
  MalformedPayloadError,
  ServiceError,
  ServiceUnreachableError,
} from './api.js';
import { renderPanel } from './panel.js';
import { Store } from './state.js';
import { renderTree } from './tree.js';
import type { DecisionConflictDoc, ModelDoc, SessionStatus } from './types.js';

export class App {
  readonly store = new Store();
  private model: ModelDoc | null = null;
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async start(): Promise<void> {
    this.store.subscribe(() => this.render());
    try {
      this.model = await this.api.model();
      const created = await this.api.createSession();
      this.store.loadSession(await this.api.session(created.session_id));
    } catch (err) {
      this.fail(err);
    }
  }

  /** Resolves once every queued action has been processed. */
  idle(): Promise<void> {
    return this.queue;
  }

  decide(feature: string, choice: 'selected' | 'rejected'): Promise<void> {
    return this.enqueue(() => this.doDecide(feature, choice));
  }

  retract(feature: string): Promise<void> {
    return this.enqueue(() => this.doRetract(feature));
  }

  showRecommendations(k?: number): Promise<void> {
    return this.enqueue(() => this.doShowRecommendations(k));
  }

  applyRecommendation(configId: string): Promise<void> {
    return this.enqueue(() => this.doApply(configId));
  }

  private enqueue(op: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(op);
    return this.queue;
  }

  private sessionId(): string {
    const id = this.store.get().sessionId;
    if (id === null) throw new Error('no session yet');
    return id;
  }

  private async doDecide(feature: string, choice: 'selected' | 'rejected'): Promise<void> {
    // Re-deciding a user-decided feature can unwind earlier propagation, so
    // the delta alone is not enough; re-fetch the full session afterwards.
    const wasUserDecided = this.store.get().states[feature]?.provenance === 'user';
    try {
      const accepted = await this.api.decide(this.sessionId(), feature, choice);
      if (wasUserDecided) {
        const changed = [feature, ...accepted.derived.map((d) => d.feature)];
        this.store.loadSession(await this.api.session(this.sessionId()), changed);
      } else {
        this.store.applyDelta(accepted.derived, accepted.status, accepted.suggested, {
          feature: accepted.feature,
          state: { state: accepted.choice, provenance: 'user' },
        });
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private async doRetract(feature: string): Promise<void> {
    try {
      const accepted = await this.api.retract(this.sessionId(), feature);
      const changed = [feature, ...accepted.derived.map((d) => d.feature)];
      this.store.loadSession(await this.api.session(this.sessionId()), changed);
    } catch (err) {
      this.fail(err);
    }
  }

  private async doShowRecommendations(k?: number): Promise<void> {
    try {
      const doc = await this.api.recommendations(this.sessionId(), k);
      this.store.set({ recommendations: doc.recommendations, banner: null, lastChanged: [] });
    } catch (err) {
      this.fail(err);
    }
  }

  private async doApply(configId: string): Promise<void> {
    try {
      const accepted = await this.api.apply(this.sessionId(), configId);
      const changed = [...accepted.derived.map((d) => d.feature)];
      this.store.loadSession(await this.api.session(this.sessionId()), changed);
      this.store.set({ recommendations: null });
    } catch (err) {
      this.fail(err);
    }
  }

  /** Route a failed call into the banner; the tree is left as it was. */
  private fail(err: unknown): void {
    if (err instanceof ServiceError) {
      const body = err.body as unknown as DecisionConflictDoc;
      if (body.outcome === 'conflict') {
        this.store.set({
          status: body.status,
          banner: {
            kind: 'conflict',
            text: `Cannot make ${body.feature} ${body.choice}:`,
            violations: body.violations,
          },
          lastChanged: [],
        });
        return;
      }
      this.store.set({
        banner: { kind: 'error', text: err.message, violations: [] },
        lastChanged: [],
      });
      return;
    }
    if (err instanceof ServiceUnreachableError) {
      this.store.set({
        banner: {
          kind: 'error',
          text: 'Service unreachable — nothing was changed.',
          violations: [],
        },
        lastChanged: [],
      });
      return;
    }
    if (err instanceof MalformedPayloadError) {
      this.store.set({
        banner: { kind: 'error', text: `Bad service payload: ${err.message}`, violations: [] },
        lastChanged: [],
      });
      return;
    }
    console.error(err);
    this.store.set({
      banner: { kind: 'error', text: String(err), violations: [] },
      lastChanged: [],
    });
  }

  private render(): void {
    const view = this.store.get();
    this.root.innerHTML = '';

    const header = document.createElement('header');
    const title = document.createElement('h1');
    title.textContent = 'Product configurator';
    header.appendChild(title);
    if (view.status !== null) {
      header.appendChild(statusPill(view.status));
    }
    if (view.facet !== null) {
      const facet = document.createElement('span');
      facet.className = 'facet-name';
      facet.textContent = `matching on: ${view.facet}`;
      header.appendChild(facet);
    }
    this.root.appendChild(header);

    if (view.banner !== null) {
      const banner = document.createElement('div');
      banner.className = `banner banner-${view.banner.kind}`;
      const text = document.createElement('div');
      text.className = 'banner-text';
      text.textContent = view.banner.text;
      banner.appendChild(text);
      for (const violation of view.banner.violations) {
        const line = document.createElement('div');
        line.className = 'violation';
        line.textContent = violation.text;
        banner.appendChild(line);
      }
      this.root.appendChild(banner);
    }

    if (this.model === null || view.sessionId === null) return;

    this.root.appendChild(this.renderToolbar());
    try {
      this.root.appendChild(
        renderTree(this.model, view, {
          onDecide: (feature, choice) => void this.decide(feature, choice),
          onRetract: (feature) => void this.retract(feature),
        }),
      );
    } catch (err) {
      const broken = document.createElement('div');
      broken.className = 'banner banner-error';
      broken.textContent = `Cannot render model: ${String(err)}`;
      this.root.appendChild(broken);
    }
    this.root.appendChild(
      renderPanel(view.recommendations, {
        onApply: (configId) => void this.applyRecommendation(configId),
      }),
    );
  }

  private renderToolbar(): HTMLElement {
    const bar = document.createElement('div');
    bar.className = 'toolbar';

    const kInput = document.createElement('input');
    kInput.className = 'k-input';
    kInput.type = 'number';
    kInput.value = '4';
    bar.appendChild(kInput);

    const recommend = document.createElement('button');
    recommend.className = 'btn-recommend';
    recommend.textContent = 'Suggest configurations';
    recommend.addEventListener('click', () => {
      const k = Number(kInput.value);
      void this.showRecommendations(Number.isFinite(k) ? k : undefined);
    });
    bar.appendChild(recommend);
    return bar;
  }
}

function statusPill(status: SessionStatus): HTMLElement {
  const pill = document.createElement('span');
  pill.className = `status status-${status}`;
  pill.textContent = status;
  return pill;
}
