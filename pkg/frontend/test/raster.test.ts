import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { COLORS, pixelClasses, rasterToRgba, unitToPixel, whiteFraction } from "../src/raster.js";
import type { Report } from "../src/types.js";

const report: Report = JSON.parse(
  readFileSync(new URL("./fixtures/worked_session_report.json", import.meta.url), "utf8"),
);

describe("slice raster rendering (worked 16-run session)", () => {
  const slice = report.slice;
  const cellPx = 4;

  it("every rendered pixel carries exactly the report's cell class", () => {
    const classes = pixelClasses(slice, cellPx);
    const side = slice.grid * cellPx;
    expect(classes.length).toBe(side * side);
    for (let py = 0; py < side; py++) {
      for (let px = 0; px < side; px++) {
        const i = Math.floor(px / cellPx);
        const j = Math.floor(py / cellPx);
        expect(classes[py * side + px]).toBe(slice.raster[i][j]);
      }
    }
  });

  it("white-pixel fraction matches the reported uncertain volume within one cell", () => {
    const classes = pixelClasses(slice, cellPx);
    const frac = whiteFraction(classes);
    expect(frac).toBeCloseTo(slice.uncertain_fraction, 12);
    expect(Math.abs(frac - report.v_uncertain)).toBeLessThanOrEqual(1 / slice.grid);
  });

  it("rgba buffer uses the figure palette and flips y for the canvas", () => {
    const side = slice.grid * cellPx;
    const buf = rasterToRgba(slice, cellPx);
    expect(buf.length).toBe(side * side * 4);
    // bottom-left pixel (canvas row side-1) shows raster[0][0]
    const at = ((side - 1) * side + 0) * 4;
    const expected = COLORS[slice.raster[0][0]];
    expect([buf[at], buf[at + 1], buf[at + 2], buf[at + 3]]).toEqual(expected);
    // top-right pixel shows the last cell
    const g = slice.grid;
    const atTop = (0 * side + (side - 1)) * 4;
    const expTop = COLORS[slice.raster[g - 1][g - 1]];
    expect([buf[atTop], buf[atTop + 1], buf[atTop + 2], buf[atTop + 3]]).toEqual(expTop);
  });

  it("maps unit coordinates to y-down pixels", () => {
    const pos = unitToPixel(0.0, 0.0, slice.grid, cellPx);
    expect(pos).toEqual({ x: 0, y: slice.grid * cellPx });
    const top = unitToPixel(1.0, 1.0, slice.grid, cellPx);
    expect(top).toEqual({ x: slice.grid * cellPx, y: 0 });
  });

  it("the fixture itself is the published worked example", () => {
    expect(report.v_uncertain).toBeCloseTo(0.1875, 12);
    expect(report.n_evaluated).toBe(16);
    expect(report.svc).not.toBeNull();
    expect(report.slice.decision).not.toBeNull();
  });
});
