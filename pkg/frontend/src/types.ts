/**
 * View-model types: direct projections of gateway response bodies plus
 * client-only UI state. No field here is invented client-side; every
 * rendered value traces back to an API response.
 */

export interface SessionInfo {
  token: string;
  userId: string;
  orgName: string;
  role: string;
  expiresAt: number;
}

export interface GarageItemView {
  vin: string;
  make: string;
  model: string;
  year: number;
  registrationNumber: string;
  certified: boolean;
  role: 'owner' | 'granted';
  level: string | null;
}

export interface MediaRefView {
  cid: string;
  filename: string;
  mediaType: string;
  sizeBytes: number;
  anchorState: 'pending' | 'anchored';
}

export interface StepView {
  stepId: string;
  title: string;
  activityType: string;
  description: string;
  materials: string[];
  tools: string[];
  performedByUserId: string;
  workshopOrg: string;
  createdAt: number;
  evidence: MediaRefView[];
}

export interface AccessEntryView {
  granteeUserId: string;
  level: string;
  grantedByUserId: string;
  grantedAt: number;
}

export interface CardView {
  classic: {
    vin: string;
    make: string;
    model: string;
    year: number;
    registrationNumber: string;
    ownerUserId: string;
    certified: boolean;
    certifiedAt: number | null;
    certifierUserId: string | null;
    documents: MediaRefView[];
    stepIds: string[];
  };
  steps: StepView[];
  access: { vin: string; entries: AccessEntryView[] };
  certificationTxId: string | null;
  versionCount: number;
}

export interface HistoryEntryView {
  txId: string;
  timestamp: number;
  submitter: { userId: string; orgName: string };
  function: string;
  changes: string[];
  snapshot: CardView['classic'] | null;
}

/** Draft state for the restoration-step form (client-only). */
export interface StepFormDraft {
  title: string;
  activityType: string;
  description: string;
  materials: string[];
  tools: string[];
  files: File[];
}

export interface UploadResult {
  txId: string;
  stepId: string;
  evidence: MediaRefView[];
}
