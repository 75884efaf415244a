/** Field selection: point-bbox feature query, then a zonal-stats fetch for
 * the clicked field. State is left untouched when the service fails. */

import { ApiError, CatalogClient, ZonalRecord } from "./api.js";
import { ViewerState, clearSelection } from "./state.js";

export interface StatsPanel {
  fieldId: number;
  cropCode: string;
  record: ZonalRecord | null;
}

export interface SelectResult {
  state: ViewerState;
  panel: StatsPanel | null;
  error: string | null;
}

export async function selectField(
  state: ViewerState,
  client: CatalogClient,
  vectorLayerId: string,
  rasterLayerId: string,
  mapX: number,
  mapY: number,
): Promise<SelectResult> {
  try {
    const hits = await client.features(vectorLayerId, {
      bbox: [mapX, mapY, mapX, mapY],
    });
    if (hits.length === 0) {
      return { state: clearSelection(state), panel: null, error: null };
    }
    const feature = hits[0];
    const fieldId = feature.properties.field_id;
    const records = await client.zonalStats(rasterLayerId, vectorLayerId);
    const record = records.find((r) => r.field_id === fieldId) ?? null;
    return {
      state: {
        ...state,
        selectedField: { layerId: vectorLayerId, fieldId },
      },
      panel: { fieldId, cropCode: feature.properties.crop_code, record },
      error: null,
    };
  } catch (err) {
    const detail = err instanceof ApiError ? err.message : "service unreachable";
    return { state, panel: null, error: detail };
  }
}
