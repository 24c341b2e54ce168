/** Login and registration forms. */

import { ApiError, type ApiClient } from '../api.js';
import { clear, h } from '../dom.js';
import type { SessionInfo } from '../types.js';

export class LoginView {
  lastError: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onLogin: (session: SessionInfo) => void,
  ) {}

  async login(email: string, password: string): Promise<void> {
    this.lastError = null;
    try {
      const session = await this.api.login(email, password);
      this.onLogin(session);
    } catch (error) {
      this.lastError = error instanceof ApiError ? error.message : String(error);
      this.render();
    }
  }

  async register(displayName: string, email: string, password: string,
                 org: string, role: string): Promise<void> {
    this.lastError = null;
    try {
      await this.api.register(displayName, email, password, org, role);
      await this.login(email, password);
    } catch (error) {
      this.lastError = error instanceof ApiError ? error.message : String(error);
      this.render();
    }
  }

  render(): void {
    clear(this.container);
    const email = h('input', { name: 'email', type: 'email', placeholder: 'email' });
    const password = h('input', { name: 'password', type: 'password', placeholder: 'password' });
    this.container.append(h('h2', {}, ['Sign in']), h('form', {
      class: 'login-form',
      'data-testid': 'login-form',
      onsubmit: (event: Event) => {
        event.preventDefault();
        void this.login(email.value, password.value);
      },
    }, [email, password, h('button', { type: 'submit' }, ['log in'])]));

    const name = h('input', { name: 'displayName', placeholder: 'display name' });
    const regEmail = h('input', { name: 'regEmail', type: 'email', placeholder: 'email' });
    const regPassword = h('input', { name: 'regPassword', type: 'password',
                                     placeholder: 'password (8+ chars)' });
    const org = h('select', { name: 'org' }, [
      h('option', { value: 'OwnersOrg' }, ['Classic car owner']),
      h('option', { value: 'WorkshopsOrg' }, ['Restoration shop']),
      h('option', { value: 'CertifiersOrg' }, ['Certification body']),
    ]);
    const roleFor: Record<string, string> = {
      OwnersOrg: 'owner', WorkshopsOrg: 'restorer', CertifiersOrg: 'certifier',
    };
    this.container.append(h('h2', {}, ['New account']), h('form', {
      class: 'register-form',
      'data-testid': 'register-form',
      onsubmit: (event: Event) => {
        event.preventDefault();
        void this.register(name.value, regEmail.value, regPassword.value,
                           org.value, roleFor[org.value]);
      },
    }, [name, regEmail, regPassword, org, h('button', { type: 'submit' }, ['register'])]));

    if (this.lastError) {
      this.container.append(h('p', { class: 'error', 'data-testid': 'login-error' },
                              [this.lastError]));
    }
  }
}
