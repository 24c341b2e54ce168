/**
 * Restoration-step form with multi-file evidence upload. Progress is
 * optimistic per file while the request is in flight, but the rendered
 * result always comes from the server response (pending anchor badges
 * and all); the response arrives without waiting for anchoring.
 */

import { ApiError, type ApiClient } from '../api.js';
import { clear, h } from '../dom.js';
import type { StepFormDraft, UploadResult } from '../types.js';

export type UploadPhase = 'idle' | 'uploading' | 'done' | 'error';

export class StepUploadForm {
  draft: StepFormDraft = {
    title: '', activityType: 'other', description: '', materials: [], tools: [], files: [],
  };
  phase: UploadPhase = 'idle';
  result: UploadResult | null = null;
  lastError: string | null = null;
  retryable = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly vin: string,
    private readonly onCommitted: (result: UploadResult) => void,
  ) {}

  setFiles(files: File[]): void {
    this.draft.files = files;
    this.render();
  }

  async submit(): Promise<void> {
    if (!this.draft.title) {
      this.lastError = 'title is required';
      this.render();
      return;
    }
    this.phase = 'uploading';
    this.lastError = null;
    this.retryable = false;
    this.render();
    try {
      const result = await this.api.addRestorationStep(this.vin, {
        title: this.draft.title,
        activityType: this.draft.activityType,
        description: this.draft.description,
        materials: this.draft.materials,
        tools: this.draft.tools,
      }, this.draft.files);
      this.phase = 'done';
      this.result = result;
      this.onCommitted(result);
    } catch (error) {
      this.phase = 'error';
      if (error instanceof ApiError) {
        this.lastError = `${error.code}: ${error.message}`;
        this.retryable = error.retryable;
      } else {
        this.lastError = String(error);
      }
    }
    this.render();
  }

  render(): void {
    clear(this.container);
    this.container.append(h('h3', {}, ['Record a restoration step']));

    const title = h('input', { name: 'title', placeholder: 'title', value: this.draft.title });
    title.addEventListener('input', () => { this.draft.title = title.value; });
    const activity = h('select', { name: 'activityType' },
      ['bodywork', 'paint', 'mechanical', 'upholstery', 'electrical', 'inspection', 'other']
        .map((a) => h('option', { value: a }, [a])));
    activity.value = this.draft.activityType;
    activity.addEventListener('change', () => { this.draft.activityType = activity.value; });
    const description = h('textarea', { name: 'description' }, [this.draft.description]);
    description.addEventListener('input', () => { this.draft.description = description.value; });
    const fileInput = h('input', { type: 'file', name: 'files', multiple: 'multiple' });
    fileInput.addEventListener('change', () => {
      this.setFiles(Array.from(fileInput.files ?? []));
    });

    this.container.append(h('form', {
      class: 'step-form',
      'data-testid': 'step-form',
      onsubmit: (event: Event) => {
        event.preventDefault();
        void this.submit();
      },
    }, [title, activity, description, fileInput,
        h('button', { type: 'submit' }, ['record step'])]));

    const fileList = h('ul', { class: 'file-list', 'data-testid': 'file-list' });
    for (const file of this.draft.files) {
      const status = this.phase === 'uploading' ? 'uploading…'
        : this.phase === 'done' ? 'uploaded' : 'selected';
      fileList.append(h('li', { 'data-filename': file.name }, [
        `${file.name} — `, h('span', { class: `file-${status}` }, [status]),
      ]));
    }
    this.container.append(fileList);

    if (this.phase === 'done' && this.result) {
      this.container.append(h('div', { class: 'upload-result', 'data-testid': 'upload-result' }, [
        h('p', {}, [`Step ${this.result.stepId} committed (tx ${this.result.txId}).`]),
        h('ul', {}, this.result.evidence.map((ref) =>
          h('li', {}, [
            `${ref.filename}: `,
            h('span', { class: `badge badge-${ref.anchorState}` }, [ref.anchorState]),
          ]))),
        h('p', {}, ['Anchoring continues in the background; badges update on the card.']),
      ]));
    }
    if (this.lastError) {
      this.container.append(h('p', { class: 'error', 'data-testid': 'upload-error' }, [
        this.lastError,
        this.retryable ? ' — the ledger was busy; try again.' : '',
      ]));
    }
  }
}
