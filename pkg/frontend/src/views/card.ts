/**
 * Vehicle Card page: fundamental data, certification state, documents,
 * restoration steps with per-file anchor badges. Polls the card while
 * any media reference is still pending so badges flip to "anchored"
 * without a reload.
 */

import type { ApiClient } from '../api.js';
import { clear, formatBytes, formatTimestamp, h } from '../dom.js';
import type { CardView, MediaRefView } from '../types.js';

export const ANCHOR_POLL_MS = 5000;

export class CardPage {
  private timer: ReturnType<typeof setTimeout> | null = null;
  card: CardView | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly vin: string,
  ) {}

  async load(): Promise<void> {
    this.card = await this.api.getCard(this.vin);
    this.render();
    this.schedulePollIfPending();
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
  }

  private hasPending(): boolean {
    if (!this.card) return false;
    const refs: MediaRefView[] = [
      ...this.card.classic.documents,
      ...this.card.steps.flatMap((s) => s.evidence),
    ];
    return refs.some((r) => r.anchorState === 'pending');
  }

  private schedulePollIfPending(): void {
    this.dispose();
    if (this.hasPending()) {
      this.timer = setTimeout(() => {
        void this.load();
      }, ANCHOR_POLL_MS);
    }
  }

  private anchorBadge(ref: MediaRefView): HTMLElement {
    return ref.anchorState === 'anchored'
      ? h('span', { class: 'badge badge-anchored', 'data-cid': ref.cid }, ['anchored'])
      : h('span', { class: 'badge badge-pending', 'data-cid': ref.cid }, ['pending']);
  }

  private mediaRow(ref: MediaRefView): HTMLElement {
    return h('li', { class: 'media-row' }, [
      h('a', { href: this.api.mediaUrl(ref.cid), target: '_blank' }, [ref.filename]),
      ` (${ref.mediaType}, ${formatBytes(ref.sizeBytes)}) `,
      this.anchorBadge(ref),
    ]);
  }

  render(): void {
    if (!this.card) return;
    const { classic } = this.card;
    clear(this.container);

    const fundamental = h('section', { class: 'fundamental', 'data-testid': 'fundamental' }, [
      h('h2', {}, [`${classic.make} ${classic.model}`]),
      h('dl', {}, [
        h('dt', {}, ['VIN']), h('dd', { 'data-testid': 'vin' }, [classic.vin]),
        h('dt', {}, ['Registration']), h('dd', {}, [classic.registrationNumber]),
        h('dt', {}, ['Year']), h('dd', {}, [String(classic.year)]),
        h('dt', {}, ['Owner']), h('dd', { 'data-testid': 'owner' }, [classic.ownerUserId]),
        h('dt', {}, ['Versions']), h('dd', {}, [String(this.card.versionCount)]),
      ]),
    ]);

    const certification = classic.certified
      ? h('div', { class: 'badge badge-certified', 'data-testid': 'certified-badge' }, [
          `certified by ${classic.certifierUserId ?? ''}` +
          (classic.certifiedAt ? ` on ${formatTimestamp(classic.certifiedAt)}` : ''),
        ])
      : h('div', { class: 'badge badge-uncertified', 'data-testid': 'certified-badge' },
          ['not certified']);

    const documents = h('section', { class: 'documents' }, [
      h('h3', {}, [`Documents (${classic.documents.length})`]),
      h('ul', {}, classic.documents.map((d) => this.mediaRow(d))),
    ]);

    const steps = h('section', { class: 'steps' }, [
      h('h3', {}, [`Restoration steps (${this.card.steps.length})`]),
      ...this.card.steps.map((step) =>
        h('article', { class: 'step', 'data-testid': `step-${step.stepId}` }, [
          h('h4', {}, [`${step.title} — ${step.activityType}`]),
          h('p', {}, [
            `by ${step.performedByUserId} (${step.workshopOrg}) on ` +
            formatTimestamp(step.createdAt),
          ]),
          step.description ? h('p', {}, [step.description]) : '',
          step.materials.length
            ? h('p', {}, [`materials: ${step.materials.join(', ')}`]) : '',
          step.tools.length ? h('p', {}, [`tools: ${step.tools.join(', ')}`]) : '',
          h('ul', {}, step.evidence.map((e) => this.mediaRow(e))),
        ]),
      ),
    ]);

    this.container.append(fundamental, certification, documents, steps);
  }
}
