/**
 * Garage view: every vehicle the user owns or is authorized on, as
 * tiles with a role badge. Clicking a tile opens its Vehicle Card.
 */

import type { ApiClient } from '../api.js';
import { clear, h } from '../dom.js';
import type { GarageItemView } from '../types.js';

export class GarageView {
  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly userId: string,
    private readonly onOpen: (vin: string) => void,
  ) {}

  async refresh(): Promise<void> {
    const items = await this.api.listClassics(this.userId);
    this.render(items);
  }

  render(items: GarageItemView[]): void {
    clear(this.container);
    this.container.append(h('h2', {}, ['My garage']));
    if (items.length === 0) {
      this.container.append(
        h('div', { class: 'empty-state', 'data-testid': 'empty-garage' }, [
          h('p', {}, ['No vehicles yet.']),
          h('p', {}, ['Vehicles you own or are authorized on will appear here.']),
        ]),
      );
      return;
    }
    const grid = h('div', { class: 'garage-grid' });
    for (const item of items) {
      const badge = item.role === 'owner'
        ? h('span', { class: 'badge badge-owner' }, ['owner'])
        : h('span', { class: 'badge badge-granted' }, [`granted: ${item.level ?? ''}`]);
      const tile = h('div', {
        class: 'vehicle-tile',
        'data-testid': `tile-${item.vin}`,
        onclick: () => this.onOpen(item.vin),
      }, [
        h('h3', {}, [`${item.make} ${item.model} (${item.year})`]),
        h('p', { class: 'vin' }, [item.vin]),
        h('p', {}, [item.registrationNumber]),
        badge,
        item.certified ? h('span', { class: 'badge badge-certified' }, ['certified']) : '',
      ]);
      grid.append(tile);
    }
    this.container.append(grid);
  }
}
