import { ApiClient } from './api.js';
import { App } from './app.js';

declare global {
  interface Window {
    CLASSICSCHAIN_API_BASE?: string;
  }
}

const apiBase = window.CLASSICSCHAIN_API_BASE ?? '';
const app = new App(document.getElementById('app')!, new ApiClient(apiBase));

window.addEventListener('hashchange', () => void app.route(window.location.hash));
void app.route(window.location.hash || '#/login');
