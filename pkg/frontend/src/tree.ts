/**
 * Feature tree renderer.  Pure function of the model document and the view
 * state: every state class, badge, and highlight comes from values the
 * service sent, never from client-side evaluation.
 */

import type { FeatureDoc, GroupDoc, ModelDoc } from './types.js';
import type { ViewState } from './state.js';

export interface TreeHandlers {
  onDecide(feature: string, choice: 'selected' | 'rejected'): void;
  onRetract(feature: string): void;
}

const MARKERS: Record<string, string> = {
  root: '■',
  mandatory: '●',
  optional: '○',
  grouped: '◆',
};

const BADGES: Record<string, string> = {
  user: 'you',
  propagated: 'auto',
  root: 'root',
};

function childrenByParent(model: ModelDoc): Map<string, FeatureDoc[]> {
  const index = new Map<string, FeatureDoc[]>();
  for (const f of model.features) {
    if (f.parent === null) continue;
    const siblings = index.get(f.parent);
    if (siblings) siblings.push(f);
    else index.set(f.parent, [f]);
  }
  return index;
}

function facetTags(model: ModelDoc, featureId: string): string[] {
  return model.facets.filter((fc) => fc.members.includes(featureId)).map((fc) => fc.name);
}

function renderNode(
  model: ModelDoc,
  feature: FeatureDoc,
  view: ViewState,
  handlers: TreeHandlers,
): HTMLElement {
  const entry = view.states[feature.id] ?? { state: 'undecided', provenance: null };
  const node = document.createElement('div');
  node.className = `feature variability-${feature.variability} state-${entry.state}`;
  node.dataset.feature = feature.id;
  node.dataset.state = entry.state;
  if (entry.provenance !== null) node.dataset.provenance = entry.provenance;
  if (view.suggested === feature.id) node.classList.add('suggested');
  if (view.lastChanged.includes(feature.id)) node.classList.add('changed');

  const marker = document.createElement('span');
  marker.className = 'marker';
  marker.textContent = MARKERS[feature.variability] ?? '?';
  node.appendChild(marker);

  const name = document.createElement('span');
  name.className = 'name';
  name.textContent = feature.id;
  node.appendChild(name);

  if (entry.provenance !== null && entry.state !== 'undecided') {
    const badge = document.createElement('span');
    badge.className = `badge badge-${entry.provenance}`;
    badge.textContent = BADGES[entry.provenance] ?? entry.provenance;
    node.appendChild(badge);
  }

  for (const tag of facetTags(model, feature.id)) {
    const el = document.createElement('span');
    el.className = 'facet-tag';
    el.textContent = tag;
    node.appendChild(el);
  }

  if (view.suggested === feature.id) {
    const hint = document.createElement('span');
    hint.className = 'suggest-hint';
    hint.textContent = 'try this next';
    node.appendChild(hint);
  }

  if (feature.variability !== 'root') {
    node.appendChild(renderControls(feature.id, entry.provenance === 'user', handlers));
  }
  return node;
}

function renderControls(
  featureId: string,
  userDecided: boolean,
  handlers: TreeHandlers,
): HTMLElement {
  const controls = document.createElement('span');
  controls.className = 'controls';

  const select = document.createElement('button');
  select.className = 'ctl-select';
  select.textContent = '✓';
  select.title = 'select';
  select.addEventListener('click', () => handlers.onDecide(featureId, 'selected'));
  controls.appendChild(select);

  const reject = document.createElement('button');
  reject.className = 'ctl-reject';
  reject.textContent = '✗';
  reject.title = 'reject';
  reject.addEventListener('click', () => handlers.onDecide(featureId, 'rejected'));
  controls.appendChild(reject);

  // Retraction is only offered where the server would accept it.
  if (userDecided) {
    const clear = document.createElement('button');
    clear.className = 'ctl-clear';
    clear.textContent = '⌫';
    clear.title = 'clear decision';
    clear.addEventListener('click', () => handlers.onRetract(featureId));
    controls.appendChild(clear);
  }
  return controls;
}

function renderSubtree(
  model: ModelDoc,
  index: Map<string, FeatureDoc[]>,
  feature: FeatureDoc,
  view: ViewState,
  handlers: TreeHandlers,
): HTMLElement {
  const container = document.createElement('div');
  container.className = 'subtree';
  container.appendChild(renderNode(model, feature, view, handlers));

  const children = index.get(feature.id) ?? [];
  if (children.length === 0) return container;

  const childBlock = document.createElement('div');
  childBlock.className = 'children';

  const group = model.groups.find((g) => g.parent === feature.id);
  const members = new Set(group?.members ?? []);
  let groupBlock: HTMLElement | null = null;

  for (const child of children) {
    const sub = renderSubtree(model, index, child, view, handlers);
    if (group && members.has(child.id)) {
      if (groupBlock === null) {
        groupBlock = renderGroupBlock(group);
        childBlock.appendChild(groupBlock);
      }
      groupBlock.appendChild(sub);
    } else {
      childBlock.appendChild(sub);
    }
  }
  container.appendChild(childBlock);
  return container;
}

function renderGroupBlock(group: GroupDoc): HTMLElement {
  const block = document.createElement('div');
  block.className = 'group';
  block.dataset.parent = group.parent;

  const label = document.createElement('div');
  label.className = 'group-bounds';
  label.textContent = `⟨${group.lower}..${group.upper}⟩`;
  block.appendChild(label);
  return block;
}

export function renderTree(model: ModelDoc, view: ViewState, handlers: TreeHandlers): HTMLElement {
  const index = childrenByParent(model);
  const root = model.features.find((f) => f.id === model.root);
  if (root === undefined) {
    throw new Error(`model document has no feature for root ${model.root}`);
  }
  const tree = document.createElement('div');
  tree.className = 'tree';
  tree.appendChild(renderSubtree(model, index, root, view, handlers));
  return tree;
}
