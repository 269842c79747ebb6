// Progress chart of the uncertain volume: one point per evaluation,
// y axis always [0, 1], rendered values come straight from the API.

export interface SparkPoint {
  x: number; // pixel
  y: number; // pixel, y-down
  v: number; // the reported volume
}

export interface SparklineLayout {
  width: number;
  height: number;
  points: SparkPoint[];
  placeholder: boolean;
}

export function sparklineLayout(history: number[], width: number, height: number): SparklineLayout {
  if (history.length === 0) {
    return { width, height, points: [], placeholder: true };
  }
  const n = history.length;
  const points = history.map((v, k) => ({
    x: n === 1 ? width / 2 : (k / (n - 1)) * width,
    y: (1 - v) * height, // v = 1 at the top of the axis, 0 at the bottom
    v,
  }));
  return { width, height, points, placeholder: false };
}

/** History must never rise; flag violations so the UI can refuse stale data. */
export function isNonIncreasing(history: number[], tol = 1e-12): boolean {
  for (let k = 1; k < history.length; k++) {
    if (history[k] > history[k - 1] + tol) return false;
  }
  return true;
}
