/**
 * Access management panel: grant/revoke forms for the owner. Controls
 * are hidden for non-owners purely as a UI nicety; the server decides.
 * UI state reconciles from the server response, never from the draft.
 */

import { ApiError, type ApiClient } from '../api.js';
import { clear, formatTimestamp, h } from '../dom.js';
import type { AccessEntryView } from '../types.js';

export class AccessPanel {
  entries: AccessEntryView[] = [];
  lastError: string | null = null;
  retryable = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly vin: string,
    private readonly isOwner: boolean,
  ) {}

  setEntries(entries: AccessEntryView[]): void {
    this.entries = entries;
    this.render();
  }

  async grant(granteeUserId: string, level: string): Promise<void> {
    this.lastError = null;
    this.retryable = false;
    try {
      const body = await this.api.grantAccess(this.vin, granteeUserId, level);
      this.entries = body.access.entries;
    } catch (error) {
      this.recordError(error);
    }
    this.render();
  }

  async revoke(granteeUserId: string): Promise<void> {
    this.lastError = null;
    this.retryable = false;
    try {
      const body = await this.api.revokeAccess(this.vin, granteeUserId);
      this.entries = body.access.entries;
    } catch (error) {
      this.recordError(error);
    }
    this.render();
  }

  private recordError(error: unknown): void {
    if (error instanceof ApiError) {
      this.lastError = `${error.code}: ${error.message}`;
      this.retryable = error.retryable;
    } else {
      this.lastError = String(error);
    }
  }

  render(): void {
    clear(this.container);
    this.container.append(h('h3', {}, [`Access (${this.entries.length} grants)`]));
    const table = h('table', { class: 'access-table' }, [
      h('tr', {}, [h('th', {}, ['user']), h('th', {}, ['level']),
                   h('th', {}, ['granted by']), h('th', {}, ['at']),
                   h('th', {}, [''])]),
    ]);
    for (const entry of this.entries) {
      table.append(h('tr', { 'data-testid': `grant-${entry.granteeUserId}` }, [
        h('td', {}, [entry.granteeUserId]),
        h('td', {}, [entry.level]),
        h('td', {}, [entry.grantedByUserId]),
        h('td', {}, [formatTimestamp(entry.grantedAt)]),
        h('td', {}, [
          this.isOwner
            ? h('button', {
                class: 'revoke',
                'data-testid': `revoke-${entry.granteeUserId}`,
                onclick: () => void this.revoke(entry.granteeUserId),
              }, ['revoke'])
            : '',
        ]),
      ]));
    }
    this.container.append(table);

    if (this.isOwner) {
      const userInput = h('input', { name: 'grantee', placeholder: 'user id' });
      const levelSelect = h('select', { name: 'level' }, [
        h('option', { value: 'read' }, ['read']),
        h('option', { value: 'write' }, ['write']),
        h('option', { value: 'certify' }, ['certify']),
      ]);
      this.container.append(h('form', {
        class: 'grant-form',
        'data-testid': 'grant-form',
        onsubmit: (event: Event) => {
          event.preventDefault();
          if (userInput.value) void this.grant(userInput.value, levelSelect.value);
        },
      }, [userInput, levelSelect, h('button', { type: 'submit' }, ['grant'])]));
    }

    if (this.lastError) {
      this.container.append(h('p', { class: 'error', 'data-testid': 'access-error' }, [
        this.lastError,
        this.retryable ? ' — the ledger was busy; try again.' : '',
      ]));
    }
  }
}
