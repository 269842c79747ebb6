import { zeroContour } from "./contour.js";
import { rasterToRgba, unitToPixel } from "./raster.js";
import { sparklineLayout } from "./sparkline.js";
import type { Report } from "./types.js";

export const CELL_PX = 8;

/** Paint the three-tone region raster plus points, pending marker and the
 * estimated boundary polyline onto a canvas. */
export function renderSlice(canvas: HTMLCanvasElement, report: Report): void {
  const slice = report.slice;
  const side = slice.grid * CELL_PX;
  canvas.width = side;
  canvas.height = side;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const image = ctx.createImageData(side, side);
  image.data.set(rasterToRgba(slice, CELL_PX));
  ctx.putImageData(image, 0, 0);

  if (slice.decision) {
    ctx.strokeStyle = "#8a3ffc";
    ctx.lineWidth = 2;
    ctx.setLineDash([6, 4]);
    for (const [x0, y0, x1, y1] of zeroContour(slice.decision, slice.grid)) {
      const a = unitToPixel(x0, y0, slice.grid, CELL_PX);
      const b = unitToPixel(x1, y1, slice.grid, CELL_PX);
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.stroke();
    }
    ctx.setLineDash([]);
  }

  const [dx, dy] = slice.dims;
  for (const pt of report.evaluated) {
    const pos = unitToPixel(pt.unit[dx], pt.unit[dy], slice.grid, CELL_PX);
    ctx.beginPath();
    ctx.arc(pos.x, pos.y, 6, 0, Math.PI * 2);
    ctx.fillStyle = pt.label === -1 ? "#c62828" : "#1565c0";
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 1.5;
    ctx.stroke();
    ctx.fillStyle = "#ffffff";
    ctx.font = "9px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(pt.index), pos.x, pos.y);
  }

  if (report.pending) {
    const pos = unitToPixel(report.pending.unit[dx], report.pending.unit[dy], slice.grid, CELL_PX);
    ctx.beginPath();
    ctx.arc(pos.x, pos.y, 9, 0, Math.PI * 2);
    ctx.strokeStyle = "#f9a825";
    ctx.lineWidth = 3;
    ctx.stroke();
  }
}

export function renderSparkline(canvas: HTMLCanvasElement, history: number[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, width, height);
  ctx.strokeStyle = "#bbbbbb";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  const layout = sparklineLayout(history, width, height);
  if (layout.placeholder) {
    ctx.fillStyle = "#888888";
    ctx.font = "12px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("no evaluations yet", width / 2, height / 2);
    return;
  }
  ctx.strokeStyle = "#2e7d32";
  ctx.lineWidth = 2;
  ctx.beginPath();
  layout.points.forEach((p, k) => (k === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
  ctx.stroke();
  ctx.fillStyle = "#2e7d32";
  for (const p of layout.points) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, 2.5, 0, Math.PI * 2);
    ctx.fill();
  }
}
