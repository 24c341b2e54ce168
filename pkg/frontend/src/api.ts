/**
 * Typed client for the gateway REST routes. All authorization decisions
 * belong to the server; this layer only carries the bearer token and
 * normalizes errors.
 */

import type {
  AccessEntryView,
  CardView,
  GarageItemView,
  HistoryEntryView,
  SessionInfo,
  UploadResult,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly retryable = false,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const h: Record<string, string> = { ...extra };
    if (this.token) h['Authorization'] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(method: string, path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      ...init,
      headers: { ...this.headers(), ...(init.headers as Record<string, string> | undefined) },
    });
    if (!response.ok) {
      let code = `HTTP_${response.status}`;
      let message = response.statusText;
      let retryable = false;
      try {
        const body = (await response.json()) as {
          error?: string;
          message?: string;
          retryable?: boolean;
        };
        code = body.error ?? code;
        message = body.message ?? message;
        retryable = body.retryable ?? false;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message, retryable);
    }
    return (await response.json()) as T;
  }

  private json(body: unknown): RequestInit {
    return {
      body: JSON.stringify(body),
      headers: { 'Content-Type': 'application/json' },
    };
  }

  // -- sessions --------------------------------------------------------

  async register(displayName: string, email: string, password: string, org: string, role: string): Promise<string> {
    const body = await this.request<{ userId: string }>('POST', '/users',
      this.json({ displayName, email, password, org, role }));
    return body.userId;
  }

  async login(email: string, password: string): Promise<SessionInfo> {
    const body = await this.request<{
      token: string; userId: string; orgName: string; role: string; expiresAt: number;
    }>('POST', '/auth/login', this.json({ email, password }));
    this.token = body.token;
    return body;
  }

  // -- reads ------------------------------------------------------------

  async listClassics(userId: string): Promise<GarageItemView[]> {
    const body = await this.request<{ classics: GarageItemView[] }>(
      'GET', `/users/${encodeURIComponent(userId)}/classics`);
    return body.classics;
  }

  async getCard(vin: string): Promise<CardView> {
    const body = await this.request<{ card: CardView }>('GET', `/classics/${vin}/card`);
    return body.card;
  }

  async getHistory(vin: string): Promise<HistoryEntryView[]> {
    const body = await this.request<{ history: HistoryEntryView[] }>(
      'GET', `/classics/${vin}/history`);
    return body.history;
  }

  mediaUrl(cid: string): string {
    return `${this.baseUrl}/media/${cid}`;
  }

  // -- writes --------------------------------------------------------------

  async grantAccess(vin: string, granteeUserId: string, level: string): Promise<{
    access: { entries: AccessEntryView[] }; txId: string;
  }> {
    return this.request('POST', `/classics/${vin}/access`,
      this.json({ granteeUserId, level }));
  }

  async revokeAccess(vin: string, granteeUserId: string): Promise<{
    access: { entries: AccessEntryView[] }; txId: string;
  }> {
    return this.request('DELETE',
      `/classics/${vin}/access/${encodeURIComponent(granteeUserId)}`);
  }

  async transferOwnership(vin: string, newOwnerUserId: string): Promise<{
    card: CardView; txId: string;
  }> {
    return this.request('POST', `/classics/${vin}/owner`, this.json({ newOwnerUserId }));
  }

  async certify(vin: string): Promise<{ card: CardView; txId: string }> {
    return this.request('POST', `/classics/${vin}/certification`);
  }

  async registerClassic(input: {
    vin: string; make: string; model: string; registrationNumber: string;
    year: number; ownerUserId: string;
  }): Promise<{ card: CardView; txId: string }> {
    return this.request('POST', '/classics', this.json(input));
  }

  async addRestorationStep(
    vin: string,
    metadata: { title: string; activityType: string; description: string; materials: string[]; tools: string[] },
    files: File[],
  ): Promise<UploadResult> {
    const form = new FormData();
    form.append('metadata', JSON.stringify(metadata));
    for (const file of files) form.append('files', file, file.name);
    return this.request('POST', `/classics/${vin}/restorations`, { body: form });
  }

  async addDocument(vin: string, file: File): Promise<{ txId: string }> {
    const form = new FormData();
    form.append('metadata', '{}');
    form.append('file', file, file.name);
    return this.request('POST', `/classics/${vin}/documents`, { body: form });
  }
}
