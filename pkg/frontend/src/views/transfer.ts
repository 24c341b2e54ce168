/**
 * Ownership transfer form. Transfer is irreversible and wipes every
 * grant, so submission is two-phase: the first submit only arms a
 * confirmation dialog; the API call happens exclusively from its
 * explicit confirm button.
 */

import { ApiError, type ApiClient } from '../api.js';
import { clear, h } from '../dom.js';

export class TransferForm {
  pendingNewOwner: string | null = null;
  lastError: string | null = null;
  retryable = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly vin: string,
    private readonly onTransferred: (newOwner: string) => void,
  ) {}

  requestTransfer(newOwner: string): void {
    if (!newOwner) return;
    this.pendingNewOwner = newOwner;
    this.render();
  }

  cancel(): void {
    this.pendingNewOwner = null;
    this.render();
  }

  async confirm(): Promise<void> {
    if (this.pendingNewOwner === null) return;
    const newOwner = this.pendingNewOwner;
    this.lastError = null;
    this.retryable = false;
    try {
      await this.api.transferOwnership(this.vin, newOwner);
      this.pendingNewOwner = null;
      this.onTransferred(newOwner);
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastError = `${error.code}: ${error.message}`;
        this.retryable = error.retryable;
      } else {
        this.lastError = String(error);
      }
      this.render();
    }
  }

  render(): void {
    clear(this.container);
    this.container.append(h('h3', {}, ['Transfer ownership']));
    const input = h('input', { name: 'newOwner', placeholder: 'new owner user id' });
    this.container.append(h('form', {
      class: 'transfer-form',
      'data-testid': 'transfer-form',
      onsubmit: (event: Event) => {
        event.preventDefault();
        this.requestTransfer(input.value);
      },
    }, [input, h('button', { type: 'submit' }, ['transfer…'])]));

    if (this.pendingNewOwner !== null) {
      this.container.append(h('div', { class: 'confirm-dialog', 'data-testid': 'confirm-dialog' }, [
        h('p', {}, [
          `Transfer ${this.vin} to ${this.pendingNewOwner}? This is irreversible: ` +
          'you lose access and every existing grant is revoked.',
        ]),
        h('button', {
          class: 'confirm',
          'data-testid': 'confirm-transfer',
          onclick: () => void this.confirm(),
        }, ['yes, transfer']),
        h('button', {
          class: 'cancel',
          'data-testid': 'cancel-transfer',
          onclick: () => this.cancel(),
        }, ['cancel']),
      ]));
    }

    if (this.lastError) {
      this.container.append(h('p', { class: 'error', 'data-testid': 'transfer-error' }, [
        this.lastError,
        this.retryable ? ' — the ledger was busy; you can retry the confirmation.' : '',
      ]));
    }
  }
}
