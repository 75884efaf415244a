/** Pure view state and its transitions. Compositing order, opacity, and
 * visibility live entirely on the client; nothing here touches the server. */

export interface ActiveLayer {
  layerId: string;
  opacity: number; // clamped to [0,1]
  visible: boolean;
}

export interface Viewport {
  centerX: number; // map coordinates in the layer CRS
  centerY: number;
  zoom: number;
}

export interface SelectedField {
  layerId: string;
  fieldId: number;
}

export interface PrescriptionDraft {
  breaks: number[];
  rates: number[];
  previewLayerId: string | null;
}

export interface ViewerState {
  layers: ActiveLayer[];
  viewport: Viewport;
  selectedField: SelectedField | null;
  prescriptionDraft: PrescriptionDraft | null;
}

export function initialState(): ViewerState {
  return {
    layers: [],
    viewport: { centerX: 0, centerY: 0, zoom: 0 },
    selectedField: null,
    prescriptionDraft: null,
  };
}

const clamp01 = (v: number) => Math.min(1, Math.max(0, v));

export function addLayer(state: ViewerState, layerId: string, opacity = 1): ViewerState {
  if (state.layers.some((l) => l.layerId === layerId)) return state;
  return {
    ...state,
    layers: [...state.layers, { layerId, opacity: clamp01(opacity), visible: true }],
  };
}

export function removeLayer(state: ViewerState, layerId: string): ViewerState {
  return { ...state, layers: state.layers.filter((l) => l.layerId !== layerId) };
}

export function setOpacity(state: ViewerState, layerId: string, opacity: number): ViewerState {
  return {
    ...state,
    layers: state.layers.map((l) =>
      l.layerId === layerId ? { ...l, opacity: clamp01(opacity) } : l,
    ),
  };
}

export function toggleVisibility(state: ViewerState, layerId: string): ViewerState {
  return {
    ...state,
    layers: state.layers.map((l) =>
      l.layerId === layerId ? { ...l, visible: !l.visible } : l,
    ),
  };
}

export function setViewport(
  state: ViewerState,
  viewport: Viewport,
  maxZoom: number,
): ViewerState {
  const zoom = Math.min(maxZoom, Math.max(0, Math.round(viewport.zoom)));
  return { ...state, viewport: { ...viewport, zoom } };
}

export function clearSelection(state: ViewerState): ViewerState {
  return { ...state, selectedField: null, prescriptionDraft: null };
}

/** Layers to composite, bottom to top, visible only. */
export function renderList(state: ViewerState): ActiveLayer[] {
  return state.layers.filter((l) => l.visible && l.opacity > 0);
}
