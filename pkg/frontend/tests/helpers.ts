/** Fixture loading and a fake fetch backend for UI tests. */

import { readFileSync } from 'node:fs';
import { resolve } from 'node:path';
import { ApiClient, type FetchLike } from '../src/api.js';

// vitest runs with cwd at the frontend package root.
export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(resolve('fixtures', `${name}.json`), 'utf8')) as T;
}

export interface RecordedCall {
  method: string;
  url: string;
  body: BodyInit | null | undefined;
}

type Handler =
  | { status: number; body: unknown }
  | ((init?: RequestInit) => { status: number; body: unknown });

/** Routes "METHOD /path" to canned responses and records every call. */
export class FakeBackend {
  readonly calls: RecordedCall[] = [];
  private readonly routes = new Map<string, Handler>();

  on(method: string, path: string, handler: Handler): void {
    this.routes.set(`${method.toUpperCase()} ${path}`, handler);
  }

  callsTo(method: string, path: string): RecordedCall[] {
    return this.calls.filter((c) => c.method === method.toUpperCase() && c.url === path);
  }

  fetch: FetchLike = async (url, init) => {
    const method = (init?.method ?? 'GET').toUpperCase();
    this.calls.push({ method, url, body: init?.body });
    const handler = this.routes.get(`${method} ${url}`);
    if (!handler) {
      return new Response(JSON.stringify({ error: 'NOT_FOUND', message: `no route ${method} ${url}` }),
        { status: 404, headers: { 'content-type': 'application/json' } });
    }
    const { status, body } = typeof handler === 'function' ? handler(init) : handler;
    return new Response(JSON.stringify(body),
      { status, headers: { 'content-type': 'application/json' } });
  };
}

export function makeClient(backend: FakeBackend): ApiClient {
  const client = new ApiClient('', backend.fetch);
  client.setToken('test-token');
  return client;
}

export function container(): HTMLElement {
  const el = document.createElement('div');
  document.body.append(el);
  return el;
}
