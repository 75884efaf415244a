/** Prescription what-if controller: validates break/rate edits locally,
 * debounces slider movement, and dedupes identical submissions so each
 * distinct (breaks, rates) reaches the server at most once in a row. */

import { ApiError, CatalogClient, PrescriptionResponse } from "./api.js";

export interface DraftInput {
  breaks: number[];
  rates: number[];
  uniformRate?: number;
  unitCost?: number;
}

/** Mirror of the server-side preconditions; invalid drafts never leave
 * the client. Returns null when the draft is acceptable. */
export function validateDraft(draft: DraftInput): string | null {
  const { breaks, rates } = draft;
  for (let i = 1; i < breaks.length; i++) {
    if (!(breaks[i] > breaks[i - 1])) {
      return `breaks must be strictly increasing (break ${i} is not above break ${i - 1})`;
    }
  }
  if (rates.length !== breaks.length + 1) {
    return `expected ${breaks.length + 1} rates for ${breaks.length} breaks, got ${rates.length}`;
  }
  if (rates.some((r) => r < 0)) return "rates must be non-negative";
  return null;
}

export interface PrescriptionView {
  summaryText: string;
  total: number;
  previewLayerId: string;
}

export interface ControllerEvents {
  onResult: (view: PrescriptionView, response: PrescriptionResponse) => void;
  onValidationError: (message: string) => void;
  onServiceError: (message: string) => void;
}

const money = (v: number) => v.toFixed(2);

export function formatSummary(response: PrescriptionResponse): PrescriptionView {
  const s = response.summary;
  const parts = [`total ${money(response.total_amount)}`];
  if (s) {
    parts.push(`area ${s.area_ha.toFixed(2)} ha`);
    if (s.reduction_fraction !== null) {
      parts.push(`reduction ${(s.reduction_fraction * 100).toFixed(1)}%`);
    }
    if (s.cost_saving !== null) parts.push(`saving ${money(s.cost_saving)}`);
  }
  return {
    summaryText: parts.join(", "),
    total: s ? s.variable_total : response.total_amount,
    previewLayerId: response.layer_id,
  };
}

export class PrescriptionController {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastSentKey: string | null = null;
  private generation = 0;

  constructor(
    private client: CatalogClient,
    private events: ControllerEvents,
    private debounceMs = 250,
  ) {}

  /** Called on every slider movement. Starts (or restarts) the debounce
   * window; only the draft in hand when the window closes is submitted. */
  update(rasterId: string, vectorId: string, fieldId: number, draft: DraftInput): void {
    const problem = validateDraft(draft);
    if (problem !== null) {
      if (this.timer !== null) {
        clearTimeout(this.timer);
        this.timer = null;
      }
      this.events.onValidationError(problem);
      return;
    }
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.submit(rasterId, vectorId, fieldId, draft);
    }, this.debounceMs);
  }

  /** Force any pending draft out immediately (e.g. on slider release). */
  flush(rasterId: string, vectorId: string, fieldId: number, draft: DraftInput): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (validateDraft(draft) === null) {
      void this.submit(rasterId, vectorId, fieldId, draft);
    }
  }

  private async submit(
    rasterId: string,
    vectorId: string,
    fieldId: number,
    draft: DraftInput,
  ): Promise<void> {
    const key = JSON.stringify([rasterId, vectorId, fieldId, draft.breaks, draft.rates,
                                draft.uniformRate ?? null, draft.unitCost ?? null]);
    if (key === this.lastSentKey) return; // dedupe identical resubmission
    this.lastSentKey = key;
    const myGeneration = ++this.generation;
    try {
      const response = await this.client.prescribe({
        raster_id: rasterId,
        vector_id: vectorId,
        field_id: fieldId,
        breaks: draft.breaks,
        rates: draft.rates,
        uniform_rate: draft.uniformRate,
        unit_cost: draft.unitCost,
      });
      if (myGeneration !== this.generation) return; // superseded in flight
      this.events.onResult(formatSummary(response), response);
    } catch (err) {
      if (myGeneration !== this.generation) return;
      this.lastSentKey = null; // allow retry after failure
      const detail = err instanceof ApiError ? err.message : "service unreachable";
      this.events.onServiceError(detail);
    }
  }
}
