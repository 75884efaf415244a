/** DOM wiring: layer list with opacity sliders, tiled map pane, stats
 * panel on click, prescription sliders with live summary, histogram view.
 * All data comes from the catalog service; this file only composes it. */

import { CatalogClient, LayerEntry } from "./api.js";
import { loadHistogram } from "./histogram.js";
import { Bbox, mapToPane, paneToMap, visibleTiles } from "./map.js";
import { PrescriptionController } from "./prescription.js";
import { selectField } from "./select.js";
import {
  ViewerState,
  addLayer,
  initialState,
  renderList,
  setOpacity,
  setViewport,
  toggleVisibility,
} from "./state.js";

interface AppElements {
  pane: HTMLElement;
  layerList: HTMLElement;
  statsPanel: HTMLElement;
  summaryLine: HTMLElement;
  histogramBox: HTMLElement;
  errorToast: HTMLElement;
  breaksInput: HTMLInputElement;
  ratesInput: HTMLInputElement;
  zoomInput: HTMLInputElement;
}

const parseNumbers = (text: string): number[] =>
  text
    .split(",")
    .map((t) => t.trim())
    .filter((t) => t.length > 0)
    .map(Number);

export class ViewerApp {
  private state: ViewerState = initialState();
  private entries = new Map<string, LayerEntry>();
  private rasterId: string | null = null;
  private vectorId: string | null = null;
  private bbox: Bbox | null = null;
  private maxZoom = 0;
  private controller: PrescriptionController;

  constructor(
    private client: CatalogClient,
    private el: AppElements,
  ) {
    this.controller = new PrescriptionController(client, {
      onResult: (view, response) => {
        this.el.summaryLine.textContent = view.summaryText;
        this.state = addLayer(this.state, response.layer_id, 0.8);
        this.renderLayers();
        this.renderTiles();
      },
      onValidationError: (message) => {
        this.el.summaryLine.textContent = `invalid: ${message}`;
      },
      onServiceError: (message) => this.toast(message),
    });
    this.el.pane.addEventListener("click", (ev) => void this.onMapClick(ev));
    this.el.breaksInput.addEventListener("input", () => this.onDraftEdit());
    this.el.ratesInput.addEventListener("input", () => this.onDraftEdit());
    this.el.zoomInput.addEventListener("change", () => {
      const zoom = Number(this.el.zoomInput.value);
      this.state = setViewport(this.state, { ...this.state.viewport, zoom }, this.maxZoom);
      this.renderTiles();
    });
  }

  async start(): Promise<void> {
    const layers = await this.client.listLayers();
    for (const entry of layers) {
      this.entries.set(entry.layer_id, entry);
      this.state = addLayer(this.state, entry.layer_id);
      if (entry.kind === "raster" && this.rasterId === null) {
        this.rasterId = entry.layer_id;
        const [minX, minY, maxX, maxY] = entry.bbox;
        this.bbox = { minX, minY, maxX, maxY };
        this.maxZoom = entry.max_zoom ?? 0;
      }
      if (entry.kind === "vector" && this.vectorId === null) {
        this.vectorId = entry.layer_id;
      }
    }
    this.renderLayers();
    this.renderTiles();
    await this.renderHistogram();
  }

  private renderLayers(): void {
    this.el.layerList.textContent = "";
    for (const layer of this.state.layers) {
      const entry = this.entries.get(layer.layerId);
      const row = document.createElement("div");
      const check = document.createElement("input");
      check.type = "checkbox";
      check.checked = layer.visible;
      check.addEventListener("change", () => {
        this.state = toggleVisibility(this.state, layer.layerId);
        this.renderTiles();
      });
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.05";
      slider.value = String(layer.opacity);
      slider.addEventListener("input", () => {
        this.state = setOpacity(this.state, layer.layerId, Number(slider.value));
        this.renderTiles();
      });
      const label = document.createElement("span");
      label.textContent = entry ? `${entry.name} (${entry.kind})` : layer.layerId;
      row.append(check, slider, label);
      this.el.layerList.appendChild(row);
    }
  }

  private renderTiles(): void {
    if (!this.bbox) return;
    this.el.pane.textContent = "";
    const z = this.state.viewport.zoom;
    const paneW = this.el.pane.clientWidth || 512;
    const paneH = this.el.pane.clientHeight || 512;
    for (const layer of renderList(this.state)) {
      const entry = this.entries.get(layer.layerId);
      if (!entry || entry.kind !== "raster") continue;
      for (const tile of visibleTiles(z, 0, 0, paneW, paneH)) {
        const img = document.createElement("img");
        img.src = this.client.tileUrl(layer.layerId, tile.z, tile.x, tile.y);
        img.style.position = "absolute";
        img.style.left = `${tile.left}px`;
        img.style.top = `${tile.top}px`;
        img.style.opacity = String(layer.opacity);
        this.el.pane.appendChild(img);
      }
    }
  }

  private async onMapClick(ev: MouseEvent): Promise<void> {
    if (!this.bbox || !this.rasterId || !this.vectorId) return;
    const rect = this.el.pane.getBoundingClientRect();
    const { mapX, mapY } = paneToMap(
      this.bbox,
      this.state.viewport.zoom,
      ev.clientX - rect.left,
      ev.clientY - rect.top,
    );
    const result = await selectField(
      this.state,
      this.client,
      this.vectorId,
      this.rasterId,
      mapX,
      mapY,
    );
    this.state = result.state;
    if (result.error) {
      this.toast(result.error);
      return;
    }
    if (!result.panel) {
      this.el.statsPanel.textContent = "no field selected";
      return;
    }
    const r = result.panel.record;
    this.el.statsPanel.textContent = r
      ? `field ${result.panel.fieldId} (${result.panel.cropCode}): ` +
        `mean ${r.mean?.toFixed(4) ?? "-"}, std ${r.std?.toFixed(4) ?? "-"}, ` +
        `min ${r.min?.toFixed(4) ?? "-"}, max ${r.max?.toFixed(4) ?? "-"}, ` +
        `valid ${(r.valid_fraction * 100).toFixed(1)}%`
      : `field ${result.panel.fieldId}: no statistics`;
  }

  private onDraftEdit(): void {
    if (!this.rasterId || !this.vectorId || !this.state.selectedField) return;
    this.controller.update(this.rasterId, this.vectorId, this.state.selectedField.fieldId, {
      breaks: parseNumbers(this.el.breaksInput.value),
      rates: parseNumbers(this.el.ratesInput.value),
    });
  }

  private async renderHistogram(): Promise<void> {
    if (!this.rasterId || !this.vectorId) return;
    try {
      const { svg } = await loadHistogram(this.client, this.rasterId, this.vectorId, "mean");
      this.el.histogramBox.innerHTML = svg;
    } catch {
      this.el.histogramBox.textContent = "histogram unavailable";
    }
  }

  private toast(message: string): void {
    this.el.errorToast.textContent = message;
    this.el.errorToast.style.display = "block";
    setTimeout(() => {
      this.el.errorToast.style.display = "none";
    }, 4000);
  }

  /** Exposed for mapToPane consumers (e.g. drawing selection outlines). */
  project(mapX: number, mapY: number): { px: number; py: number } | null {
    if (!this.bbox) return null;
    return mapToPane(this.bbox, this.state.viewport.zoom, mapX, mapY);
  }
}
