import { beforeEach, describe, expect, it } from 'vitest';

import { HistoryTimeline, PAGE_SIZE } from '../src/views/history.js';
import { container, fixture } from './helpers.js';

describe('history timeline', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('renders one row per committed transaction in commit order', () => {
    const entries = fixture<{ history: any[] }>('history_small').history;
    const el = container();
    new HistoryTimeline(el).setEntries(entries);
    const rows = Array.from(el.querySelectorAll('.timeline-row'));
    expect(rows.length).toBe(entries.length);
    rows.forEach((row, i) => {
      expect(row.getAttribute('data-txid')).toBe(entries[i].txId);
      expect(row.textContent).toContain(entries[i].function);
      expect(row.textContent).toContain(entries[i].submitter.userId);
    });
  });

  it('opens a transaction-info popup whose txId matches the API', () => {
    const entries = fixture<{ history: any[] }>('history_small').history;
    const el = container();
    const timeline = new HistoryTimeline(el);
    timeline.setEntries(entries);
    const target = entries[2];
    (el.querySelector(`[data-testid="tx-info-${target.txId}"]`) as HTMLElement).click();
    const popup = el.querySelector('[data-testid="tx-popup"]')!;
    expect(popup.querySelector('[data-testid="popup-txid"]')!.textContent)
      .toBe(target.txId);
    expect(popup.textContent).toContain(target.submitter.userId);
    expect(popup.textContent).toContain(target.function);
    (el.querySelector('.popup-close') as HTMLElement).click();
    expect(el.querySelector('[data-testid="tx-popup"]')).toBeNull();
  });

  it('paginates long histories', () => {
    const entries = fixture<{ history: any[] }>('history_long').history;
    expect(entries.length).toBeGreaterThan(100);
    const el = container();
    const timeline = new HistoryTimeline(el);
    timeline.setEntries(entries);
    expect(el.querySelectorAll('.timeline-row').length).toBe(PAGE_SIZE);
    expect(el.querySelector('[data-testid="pager"]')).not.toBeNull();
    expect(timeline.pageCount()).toBe(Math.ceil(entries.length / PAGE_SIZE));

    (el.querySelector('.pager-next') as HTMLElement).click();
    const rows = Array.from(el.querySelectorAll('.timeline-row'));
    expect(rows[0].getAttribute('data-txid')).toBe(entries[PAGE_SIZE].txId);

    // Last page holds the remainder.
    timeline.goToPage(timeline.pageCount() - 1);
    expect(el.querySelectorAll('.timeline-row').length)
      .toBe(entries.length - PAGE_SIZE * (timeline.pageCount() - 1));
  });

  it('short histories render without a pager', () => {
    const entries = fixture<{ history: any[] }>('history_small').history;
    const el = container();
    new HistoryTimeline(el).setEntries(entries);
    expect(el.querySelector('[data-testid="pager"]')).toBeNull();
  });
});
