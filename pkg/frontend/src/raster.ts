import type { CellClass, SliceReport } from "./types.js";

// Region palette mirrors the published figures: red certainly negative,
// blue certainly positive, white uncertain.
export const COLORS: Record<CellClass, [number, number, number, number]> = {
  [-1]: [244, 115, 104, 255],
  0: [255, 255, 255, 255],
  1: [110, 153, 236, 255],
};

/**
 * Expand a slice raster into per-pixel classes for a square canvas of
 * size grid*cellPx. Pixel (px, py) with py measured from the BOTTOM shows
 * cell raster[i][j] where i = floor(px/cellPx), j = floor(py/cellPx):
 * dims[0] runs along x, dims[1] along y, both ascending.
 */
export function pixelClasses(slice: SliceReport, cellPx: number): CellClass[] {
  const g = slice.grid;
  const side = g * cellPx;
  const out = new Array<CellClass>(side * side);
  for (let py = 0; py < side; py++) {
    const j = Math.floor(py / cellPx);
    for (let px = 0; px < side; px++) {
      const i = Math.floor(px / cellPx);
      out[py * side + px] = slice.raster[i][j];
    }
  }
  return out;
}

/** RGBA buffer for ImageData; canvas rows run top-down, so y flips. */
export function rasterToRgba(slice: SliceReport, cellPx: number): Uint8ClampedArray {
  const g = slice.grid;
  const side = g * cellPx;
  const classes = pixelClasses(slice, cellPx);
  const buf = new Uint8ClampedArray(side * side * 4);
  for (let py = 0; py < side; py++) {
    const canvasRow = side - 1 - py;
    for (let px = 0; px < side; px++) {
      const cls = classes[py * side + px];
      const [r, gg, b, a] = COLORS[cls];
      const at = (canvasRow * side + px) * 4;
      buf[at] = r;
      buf[at + 1] = gg;
      buf[at + 2] = b;
      buf[at + 3] = a;
    }
  }
  return buf;
}

/** Fraction of pixels rendered white (uncertain). */
export function whiteFraction(classes: CellClass[]): number {
  let n = 0;
  for (const c of classes) if (c === 0) n++;
  return n / classes.length;
}

/** Unit coordinates of a slice -> canvas pixel position (y-down). */
export function unitToPixel(
  u: number,
  v: number,
  grid: number,
  cellPx: number,
): { x: number; y: number } {
  const side = grid * cellPx;
  return { x: u * side, y: side - v * side };
}
