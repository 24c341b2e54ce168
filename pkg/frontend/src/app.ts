/**
 * Application shell: hash routing, session handling, page composition.
 *
 * Routes: #/login, #/garage, #/classic/<vin> (card + history + access +
 * transfer + step upload on one page). A 401 anywhere returns to login;
 * a 403 renders the access-denied page.
 */

import { ApiClient, ApiError } from './api.js';
import { clear, h } from './dom.js';
import type { SessionInfo } from './types.js';
import { AccessPanel } from './views/access.js';
import { CardPage } from './views/card.js';
import { GarageView } from './views/garage.js';
import { HistoryTimeline } from './views/history.js';
import { LoginView } from './views/login.js';
import { TransferForm } from './views/transfer.js';
import { StepUploadForm } from './views/upload.js';

export class App {
  session: SessionInfo | null = null;
  private activeCard: CardPage | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
    private readonly navigate: (hash: string) => void = (hash) => {
      window.location.hash = hash;
    },
  ) {}

  setSession(session: SessionInfo | null): void {
    this.session = session;
    this.api.setToken(session ? session.token : null);
  }

  async route(hash: string): Promise<void> {
    this.activeCard?.dispose();
    this.activeCard = null;
    const path = hash.replace(/^#\/?/, '');
    if (!this.session && path !== 'login') {
      this.navigate('#/login');
      return;
    }
    try {
      if (path === 'login' || path === '') {
        this.renderLogin();
      } else if (path === 'garage') {
        await this.renderGarage();
      } else if (path.startsWith('classic/')) {
        await this.renderVehicle(path.slice('classic/'.length));
      } else {
        this.renderNotFound(path);
      }
    } catch (error) {
      this.renderError(error);
    }
  }

  private chrome(title: string): HTMLElement {
    clear(this.root);
    const main = h('main', { class: 'page' });
    this.root.append(
      h('header', { class: 'topbar' }, [
        h('a', { href: '#/garage' }, ['My garage']),
        h('span', { class: 'title' }, [title]),
        this.session
          ? h('span', { class: 'whoami', 'data-testid': 'whoami' },
              [`${this.session.userId} (${this.session.role})`])
          : '',
      ]),
      main,
    );
    return main;
  }

  private renderLogin(): void {
    const main = this.chrome('Sign in');
    new LoginView(main, this.api, (session) => {
      this.setSession(session);
      this.navigate('#/garage');
    }).render();
  }

  private async renderGarage(): Promise<void> {
    const main = this.chrome('Garage');
    const garage = new GarageView(main, this.api, this.session!.userId,
      (vin) => this.navigate(`#/classic/${vin}`));
    await garage.refresh();
  }

  private async renderVehicle(vin: string): Promise<void> {
    const main = this.chrome(vin);
    const cardContainer = h('section', { 'data-testid': 'card-section' });
    const historyContainer = h('section', { 'data-testid': 'history-section' });
    const accessContainer = h('section', { 'data-testid': 'access-section' });
    const transferContainer = h('section', { 'data-testid': 'transfer-section' });
    const uploadContainer = h('section', { 'data-testid': 'upload-section' });
    main.append(cardContainer, historyContainer, accessContainer,
                transferContainer, uploadContainer);

    const card = new CardPage(cardContainer, this.api, vin);
    this.activeCard = card;
    await card.load();

    const history = new HistoryTimeline(historyContainer);
    history.setEntries(await this.api.getHistory(vin));

    const isOwner = card.card!.classic.ownerUserId === this.session!.userId;
    const access = new AccessPanel(accessContainer, this.api, vin, isOwner);
    access.setEntries(card.card!.access.entries);

    if (isOwner) {
      new TransferForm(transferContainer, this.api, vin, () => {
        // Seller loses access the moment the transfer commits.
        this.renderTransferredAway(vin);
      }).render();
    }
    if (this.session!.role === 'restorer') {
      new StepUploadForm(uploadContainer, this.api, vin, () => {
        void card.load();
        void this.api.getHistory(vin).then((entries) => history.setEntries(entries));
      }).render();
    }
  }

  private renderTransferredAway(vin: string): void {
    const main = this.chrome('Ownership transferred');
    main.append(h('div', { class: 'notice', 'data-testid': 'transferred-notice' }, [
      h('p', {}, [`You transferred ${vin} to its new owner.`]),
      h('p', {}, ['The new owner now has full access; your access and all ' +
                  'previous grants have been revoked.']),
      h('a', { href: '#/garage' }, ['back to garage']),
    ]));
  }

  renderError(error: unknown): void {
    if (error instanceof ApiError && error.status === 401) {
      this.setSession(null);
      this.navigate('#/login');
      return;
    }
    const main = this.chrome('Error');
    if (error instanceof ApiError && error.status === 403) {
      main.append(h('div', { class: 'denied', 'data-testid': 'access-denied' }, [
        h('h2', {}, ['No access']),
        h('p', {}, ['You are not authorized to view this vehicle. Ask the ' +
                    'owner for a grant.']),
      ]));
      return;
    }
    main.append(h('p', { class: 'error' }, [String(error)]));
  }

  private renderNotFound(path: string): void {
    const main = this.chrome('Not found');
    main.append(h('p', {}, [`No such page: ${path}`]));
  }
}
