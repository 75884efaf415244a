/** Planar tile math for the native-CRS pyramid: a layer's bbox is split
 * into 2^z x 2^z cells of 256 px tiles; no world projection involved. */

export const TILE_SIZE = 256;

export interface Bbox {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export interface TilePlacement {
  z: number;
  x: number;
  y: number;
  /** CSS pixel offset of the tile's top-left corner inside the pane */
  left: number;
  top: number;
  size: number;
}

/** Map coordinates -> pane pixels for a pane showing the whole bbox at
 * zoom z scaled so one tile pixel is one CSS pixel. */
export function mapToPane(
  bbox: Bbox,
  z: number,
  mapX: number,
  mapY: number,
): { px: number; py: number } {
  const extent = TILE_SIZE * Math.pow(2, z);
  return {
    px: ((mapX - bbox.minX) / (bbox.maxX - bbox.minX)) * extent,
    py: ((bbox.maxY - mapY) / (bbox.maxY - bbox.minY)) * extent,
  };
}

export function paneToMap(
  bbox: Bbox,
  z: number,
  px: number,
  py: number,
): { mapX: number; mapY: number } {
  const extent = TILE_SIZE * Math.pow(2, z);
  return {
    mapX: bbox.minX + (px / extent) * (bbox.maxX - bbox.minX),
    mapY: bbox.maxY - (py / extent) * (bbox.maxY - bbox.minY),
  };
}

/** Tiles needed to cover a pane window [left, top, width, height] in pane
 * pixels, clipped to the pyramid's 2^z x 2^z grid. */
export function visibleTiles(
  z: number,
  left: number,
  top: number,
  width: number,
  height: number,
): TilePlacement[] {
  const n = Math.pow(2, z);
  const x0 = Math.max(0, Math.floor(left / TILE_SIZE));
  const y0 = Math.max(0, Math.floor(top / TILE_SIZE));
  const x1 = Math.min(n - 1, Math.floor((left + width - 1) / TILE_SIZE));
  const y1 = Math.min(n - 1, Math.floor((top + height - 1) / TILE_SIZE));
  const tiles: TilePlacement[] = [];
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      tiles.push({
        z,
        x,
        y,
        left: x * TILE_SIZE - left,
        top: y * TILE_SIZE - top,
        size: TILE_SIZE,
      });
    }
  }
  return tiles;
}
