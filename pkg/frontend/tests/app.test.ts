import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';
import { FakeBackend, fixture } from './helpers.js';

const users = fixture<{ owner: string }>('users');

describe('application shell', () => {
  let backend: FakeBackend;
  let root: HTMLElement;
  let navigations: string[];
  let app: App;

  beforeEach(() => {
    document.body.innerHTML = '';
    root = document.createElement('div');
    document.body.append(root);
    backend = new FakeBackend();
    navigations = [];
    app = new App(root, new ApiClient('', backend.fetch),
      (hash) => navigations.push(hash));
  });

  it('redirects to login when there is no session', async () => {
    await app.route('#/garage');
    expect(navigations).toEqual(['#/login']);
  });

  it('logs in from the recorded response and lands in the garage', async () => {
    const login = fixture<any>('login_owner');
    backend.on('POST', '/auth/login', { status: 200, body: login });
    backend.on('GET', `/users/${login.userId}/classics`,
      { status: 200, body: fixture('garage_owner') });
    await app.route('#/login');
    (root.querySelector('input[name="email"]') as HTMLInputElement).value =
      'olivia@fixtures.test';
    (root.querySelector('input[name="password"]') as HTMLInputElement).value =
      'fixture-pw-123';
    root.querySelector('[data-testid="login-form"]')!
      .dispatchEvent(new Event('submit'));
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(app.session?.userId).toBe(login.userId);
    expect(navigations).toContain('#/garage');
  });

  it('renders the access-denied page on a 403 card', async () => {
    app.setSession({ token: 't', userId: users.owner, orgName: 'OwnersOrg',
                     role: 'owner', expiresAt: 0 });
    backend.on('GET', '/classics/E2ECAR01/card',
      { status: 403, body: fixture('error_forbidden') });
    await app.route('#/classic/E2ECAR01');
    expect(root.querySelector('[data-testid="access-denied"]')).not.toBeNull();
  });

  it('a 401 clears the session and returns to login', async () => {
    app.setSession({ token: 'expired', userId: users.owner, orgName: 'OwnersOrg',
                     role: 'owner', expiresAt: 0 });
    backend.on('GET', `/users/${users.owner}/classics`, {
      status: 401, body: { error: 'TOKEN_EXPIRED', message: 'expired' },
    });
    await app.route('#/garage');
    expect(app.session).toBeNull();
    expect(navigations).toContain('#/login');
  });

  it('renders a full vehicle page from card + history fixtures', async () => {
    const login = fixture<any>('login_owner');
    app.setSession({ token: 't', userId: login.userId, orgName: login.orgName,
                     role: login.role, expiresAt: login.expiresAt });
    backend.on('GET', '/classics/1275MK1S/card',
      { status: 200, body: fixture('card_certified') });
    backend.on('GET', '/classics/1275MK1S/history',
      { status: 200, body: fixture('history_small') });
    await app.route('#/classic/1275MK1S');
    expect(root.querySelector('[data-testid="certified-badge"]')).not.toBeNull();
    expect(root.querySelectorAll('.timeline-row').length)
      .toBe(fixture<any>('history_small').history.length);
    // The owner sees access management and transfer controls.
    expect(root.querySelector('[data-testid="grant-form"]')).not.toBeNull();
    expect(root.querySelector('[data-testid="transfer-form"]')).not.toBeNull();
  });
});
