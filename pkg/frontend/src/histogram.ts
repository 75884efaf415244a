/** Regional histogram view: fetch bin counts for a metric and lay them
 * out as SVG bars. Counts come straight from the service. */

import { CatalogClient, HistogramResult } from "./api.js";

export interface Bar {
  lo: number;
  hi: number;
  count: number;
  /** height as a fraction of the tallest bin, 0 when all bins are empty */
  fraction: number;
}

export function histogramBars(result: HistogramResult): Bar[] {
  const n = result.counts.length;
  const width = (result.hi - result.lo) / n;
  const peak = Math.max(...result.counts, 1);
  return result.counts.map((count, i) => ({
    lo: result.lo + i * width,
    hi: i === n - 1 ? result.hi : result.lo + (i + 1) * width,
    count,
    fraction: count / peak,
  }));
}

export function histogramSvg(result: HistogramResult, width = 400, height = 120): string {
  const bars = histogramBars(result);
  const barWidth = width / bars.length;
  const rects = bars
    .map((bar, i) => {
      const h = Math.round(bar.fraction * (height - 10));
      const x = (i * barWidth).toFixed(1);
      return `<rect x="${x}" y="${height - h}" width="${(barWidth * 0.9).toFixed(1)}" height="${h}"><title>[${bar.lo.toFixed(3)}, ${bar.hi.toFixed(3)}): ${bar.count}</title></rect>`;
    })
    .join("");
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" fill="#4a7c3f">${rects}</svg>`;
}

export async function loadHistogram(
  client: CatalogClient,
  rasterId: string,
  vectorId: string,
  metric: "mean" | "std",
  crop?: string,
): Promise<{ result: HistogramResult; svg: string }> {
  const result = await client.histogram(rasterId, vectorId, metric, { crop });
  return { result, svg: histogramSvg(result) };
}
