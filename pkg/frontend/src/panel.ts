/**
 * Recommendation panel: ranked catalog entries as the service returned
 * them, with the features shared with the current selection highlighted.
 */

import type { RecommendationDoc } from './types.js';

export interface PanelHandlers {
  onApply(configId: string): void;
}

function renderEntry(rec: RecommendationDoc, handlers: PanelHandlers): HTMLElement {
  const entry = document.createElement('div');
  entry.className = 'recommendation';
  entry.dataset.configId = rec.config_id;
  entry.dataset.similarity = String(rec.similarity);

  const header = document.createElement('div');
  header.className = 'rec-header';

  const name = document.createElement('span');
  name.className = 'rec-id';
  name.textContent = rec.config_id;
  header.appendChild(name);

  const score = document.createElement('span');
  score.className = 'rec-score';
  score.textContent = rec.similarity.toFixed(4);
  header.appendChild(score);

  const apply = document.createElement('button');
  apply.className = 'rec-apply';
  apply.textContent = 'Apply';
  apply.addEventListener('click', () => handlers.onApply(rec.config_id));
  header.appendChild(apply);

  entry.appendChild(header);

  const chips = document.createElement('div');
  chips.className = 'rec-features';
  const shared = new Set(rec.shared_features);
  for (const feature of rec.features) {
    const chip = document.createElement('span');
    chip.className = shared.has(feature) ? 'chip shared' : 'chip';
    chip.textContent = feature;
    chips.appendChild(chip);
  }
  entry.appendChild(chips);
  return entry;
}

export function renderPanel(
  recommendations: RecommendationDoc[] | null,
  handlers: PanelHandlers,
): HTMLElement {
  const panel = document.createElement('div');
  panel.className = 'panel';
  if (recommendations === null) return panel;

  const title = document.createElement('h2');
  title.textContent = 'Closest catalog configurations';
  panel.appendChild(title);

  if (recommendations.length === 0) {
    const empty = document.createElement('div');
    empty.className = 'panel-empty';
    empty.textContent = 'No matching configurations in the catalog.';
    panel.appendChild(empty);
    return panel;
  }

  for (const rec of recommendations) {
    panel.appendChild(renderEntry(rec, handlers));
  }
  return panel;
}
