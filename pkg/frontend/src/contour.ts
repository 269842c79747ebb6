// Zero-level contour segments of a server-supplied decision grid via
// marching squares with linear interpolation. Values live at cell centers
// (i + 0.5) / grid in unit coordinates.

export type Segment = [x0: number, y0: number, x1: number, y1: number];

function lerp(a: number, b: number): number {
  return a / (a - b); // position of the zero between samples a and b
}

export function zeroContour(values: number[][], grid: number): Segment[] {
  const segs: Segment[] = [];
  const at = (i: number, j: number) => values[i][j];
  const coord = (k: number) => (k + 0.5) / grid;
  for (let i = 0; i < grid - 1; i++) {
    for (let j = 0; j < grid - 1; j++) {
      const v00 = at(i, j);
      const v10 = at(i + 1, j);
      const v01 = at(i, j + 1);
      const v11 = at(i + 1, j + 1);
      const crossings: Array<[number, number]> = [];
      if (v00 === 0 && v10 === 0 && v01 === 0 && v11 === 0) continue;
      if (v00 * v10 < 0) crossings.push([coord(i) + lerp(v00, v10) / grid, coord(j)]);
      if (v01 * v11 < 0) crossings.push([coord(i) + lerp(v01, v11) / grid, coord(j + 1)]);
      if (v00 * v01 < 0) crossings.push([coord(i), coord(j) + lerp(v00, v01) / grid]);
      if (v10 * v11 < 0) crossings.push([coord(i + 1), coord(j) + lerp(v10, v11) / grid]);
      if (crossings.length >= 2) {
        for (let k = 0; k + 1 < crossings.length; k += 2) {
          segs.push([crossings[k][0], crossings[k][1], crossings[k + 1][0], crossings[k + 1][1]]);
        }
      }
    }
  }
  return segs;
}
