/**
 * Canvas drawing helpers. Everything draws against the standard 2D
 * context contract so tests can substitute a recording fake.
 */

import { Contour } from "./api.js";
import { Stroke } from "./annotations.js";

export interface Ctx2D {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  closePath(): void;
}

export function drawContour(
  ctx: Ctx2D,
  contour: Contour,
  scale: number,
  color = "#ff3333",
): void {
  if (contour.vertices.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  const [x0, y0] = contour.vertices[0];
  ctx.moveTo(x0 * scale, y0 * scale);
  for (let i = 1; i < contour.vertices.length; i++) {
    const [x, y] = contour.vertices[i];
    ctx.lineTo(x * scale, y * scale);
  }
  if (contour.closed) ctx.closePath();
  ctx.stroke();
}

export function drawStroke(
  ctx: Ctx2D,
  stroke: Stroke,
  scale: number,
): void {
  ctx.strokeStyle = stroke.kind === "barrier" ? "#ffffff" : "#33cc66";
  ctx.lineWidth = 3;
  ctx.beginPath();
  const [x0, y0] = stroke.vertices[0];
  ctx.moveTo(x0 * scale, y0 * scale);
  for (let i = 1; i < stroke.vertices.length; i++) {
    const [x, y] = stroke.vertices[i];
    ctx.lineTo(x * scale, y * scale);
  }
  ctx.stroke();
}

export function drawLandmark(
  ctx: Ctx2D,
  point: [number, number],
  scale: number,
): void {
  ctx.fillStyle = "#ff9900";
  ctx.beginPath();
  ctx.arc(point[0] * scale, point[1] * scale, 4, 0, 2 * Math.PI);
  ctx.fill();
}

/** Map a canvas event position to integer image pixel coordinates. */
export function canvasToImage(
  canvasX: number,
  canvasY: number,
  scale: number,
  width: number,
  height: number,
): [number, number] {
  const x = Math.min(Math.max(Math.round(canvasX / scale), 0), width - 1);
  const y = Math.min(Math.max(Math.round(canvasY / scale), 0), height - 1);
  return [x, y];
}
