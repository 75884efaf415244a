/** Typed client for the catalog service. The viewer never computes
 * statistics itself; every number shown comes from these endpoints. */

export interface LayerEntry {
  layer_id: string;
  name: string;
  kind: "raster" | "vector";
  epsg_code: number;
  bbox: [number, number, number, number];
  created_at: string;
  max_zoom?: number;
}

export interface ZonalRecord {
  field_id: number;
  pixel_count: number;
  valid_count: number;
  mean: number | null;
  std: number | null;
  min: number | null;
  max: number | null;
  valid_fraction: number;
}

export interface HistogramResult {
  lo: number;
  hi: number;
  counts: number[];
  underflow: number;
  overflow: number;
}

export interface FeatureDoc {
  type: "Feature";
  properties: { field_id: number; crop_code: string; [key: string]: unknown };
  geometry: { type: "Polygon"; coordinates: number[][][] };
}

export interface PrescriptionSummary {
  area_ha: number;
  variable_total: number;
  uniform_total: number | null;
  reduction_fraction: number | null;
  cost_saving: number | null;
  saving_per_ha: number | null;
}

export interface PrescriptionResponse {
  layer_id: string;
  total_amount: number;
  summary?: PrescriptionSummary;
}

export interface ServiceErrorBody {
  error: string;
  detail: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceErrorBody,
  ) {
    super(`${body.error}: ${body.detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class CatalogClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: ServiceErrorBody;
      try {
        body = (await resp.json()) as ServiceErrorBody;
      } catch {
        body = { error: "Unknown", detail: `HTTP ${resp.status}` };
      }
      throw new ApiError(resp.status, body);
    }
    return (await resp.json()) as T;
  }

  listLayers(): Promise<LayerEntry[]> {
    return this.request("/layers");
  }

  getLayer(id: string): Promise<LayerEntry> {
    return this.request(`/layers/${id}`);
  }

  tileUrl(id: string, z: number, x: number, y: number, ramp = "ndvi"): string {
    return `${this.baseUrl}/tiles/${id}/${z}/${x}/${y}.png?ramp=${encodeURIComponent(ramp)}`;
  }

  async features(
    id: string,
    opts: { bbox?: [number, number, number, number]; crop?: string } = {},
  ): Promise<FeatureDoc[]> {
    const params = new URLSearchParams();
    if (opts.bbox) params.set("bbox", opts.bbox.join(","));
    if (opts.crop) params.set("crop", opts.crop);
    const qs = params.toString();
    const doc = await this.request<{ features: FeatureDoc[] }>(
      `/features/${id}${qs ? "?" + qs : ""}`,
    );
    return doc.features;
  }

  zonalStats(rasterId: string, vectorId: string, crop?: string): Promise<ZonalRecord[]> {
    const params = new URLSearchParams({ raster: rasterId, vector: vectorId });
    if (crop) params.set("crop", crop);
    return this.request(`/stats/zonal?${params}`);
  }

  histogram(
    rasterId: string,
    vectorId: string,
    metric: "mean" | "std",
    opts: { lo?: number; hi?: number; bins?: number; crop?: string } = {},
  ): Promise<HistogramResult> {
    const params = new URLSearchParams({
      raster: rasterId,
      vector: vectorId,
      metric,
    });
    if (opts.lo !== undefined) params.set("lo", String(opts.lo));
    if (opts.hi !== undefined) params.set("hi", String(opts.hi));
    if (opts.bins !== undefined) params.set("bins", String(opts.bins));
    if (opts.crop) params.set("crop", opts.crop);
    return this.request(`/stats/histogram?${params}`);
  }

  prescribe(body: {
    raster_id: string;
    vector_id: string;
    field_id: number;
    breaks: number[];
    rates: number[];
    uniform_rate?: number;
    unit_cost?: number;
  }): Promise<PrescriptionResponse> {
    return this.request("/prescriptions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
