import { ApiClient } from './api.js';
import { App } from './app.js';

// API origin: ?api=http://host:port, else same origin as the page.
function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get('api');
  return (param ?? window.location.origin).replace(/\/$/, '');
}

window.addEventListener('DOMContentLoaded', () => {
  const root = document.getElementById('app');
  if (!root) {
    throw new Error('missing #app element');
  }
  const api = new ApiClient(apiBase(), (url, init) => window.fetch(url, init));
  void new App(root, api).start();
});
