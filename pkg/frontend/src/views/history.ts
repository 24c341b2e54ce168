/**
 * Vehicle Card history timeline: one row per committed transaction in
 * commit order, with a transaction-information popup (txId, submitter,
 * function, timestamp) and pagination for long histories.
 */

import { clear, formatTimestamp, h } from '../dom.js';
import type { HistoryEntryView } from '../types.js';

export const PAGE_SIZE = 25;

export class HistoryTimeline {
  page = 0;
  private entries: HistoryEntryView[] = [];
  private popupEntry: HistoryEntryView | null = null;

  constructor(private readonly container: HTMLElement) {}

  setEntries(entries: HistoryEntryView[]): void {
    this.entries = entries;
    this.page = 0;
    this.render();
  }

  pageCount(): number {
    return Math.max(1, Math.ceil(this.entries.length / PAGE_SIZE));
  }

  openPopup(txId: string): void {
    this.popupEntry = this.entries.find((e) => e.txId === txId) ?? null;
    this.render();
  }

  closePopup(): void {
    this.popupEntry = null;
    this.render();
  }

  goToPage(page: number): void {
    this.page = Math.max(0, Math.min(page, this.pageCount() - 1));
    this.render();
  }

  render(): void {
    clear(this.container);
    this.container.append(h('h3', {}, [`History (${this.entries.length} versions)`]));
    const start = this.page * PAGE_SIZE;
    const visible = this.entries.slice(start, start + PAGE_SIZE);
    const list = h('ol', { class: 'timeline', start: String(start + 1) });
    for (const entry of visible) {
      list.append(h('li', { class: 'timeline-row', 'data-txid': entry.txId }, [
        h('span', { class: 'when' }, [formatTimestamp(entry.timestamp)]),
        ' ',
        h('strong', {}, [entry.function]),
        ` by ${entry.submitter.userId} (${entry.submitter.orgName}) `,
        entry.changes.length ? h('em', {}, [`changed: ${entry.changes.join(', ')}`]) : '',
        ' ',
        h('button', {
          class: 'tx-info',
          'data-testid': `tx-info-${entry.txId}`,
          onclick: () => this.openPopup(entry.txId),
        }, ['transaction info']),
      ]));
    }
    this.container.append(list);

    if (this.pageCount() > 1) {
      this.container.append(h('nav', { class: 'pager', 'data-testid': 'pager' }, [
        h('button', {
          class: 'pager-prev',
          onclick: () => this.goToPage(this.page - 1),
        }, ['previous']),
        h('span', {}, [` page ${this.page + 1} / ${this.pageCount()} `]),
        h('button', {
          class: 'pager-next',
          onclick: () => this.goToPage(this.page + 1),
        }, ['next']),
      ]));
    }

    if (this.popupEntry) {
      const entry = this.popupEntry;
      this.container.append(h('div', { class: 'popup', 'data-testid': 'tx-popup' }, [
        h('h4', {}, ['Transaction information']),
        h('dl', {}, [
          h('dt', {}, ['Transaction id']),
          h('dd', { 'data-testid': 'popup-txid' }, [entry.txId]),
          h('dt', {}, ['Submitted by']),
          h('dd', {}, [`${entry.submitter.userId} (${entry.submitter.orgName})`]),
          h('dt', {}, ['Function']),
          h('dd', {}, [entry.function]),
          h('dt', {}, ['Timestamp']),
          h('dd', {}, [formatTimestamp(entry.timestamp)]),
        ]),
        h('button', { class: 'popup-close', onclick: () => this.closePopup() }, ['close']),
      ]));
    }
  }
}
