/**
 * Annotation model: the landmark point plus foreground/barrier scribble
 * strokes, with undo. Strokes are captured at mouse-move resolution and
 * decimated to at most one vertex per pixel of arc length before they are
 * sent to the server (which rasterizes them into a pixel mask).
 */

export type ScribbleKind = "foreground" | "barrier";

export interface Stroke {
  kind: ScribbleKind;
  vertices: number[][];
}

export function decimate(vertices: number[][], minStep = 1.0): number[][] {
  if (vertices.length <= 1) return vertices.slice();
  const out = [vertices[0]];
  let [px, py] = vertices[0];
  for (let i = 1; i < vertices.length - 1; i++) {
    const [x, y] = vertices[i];
    if (Math.hypot(x - px, y - py) >= minStep) {
      out.push(vertices[i]);
      [px, py] = [x, y];
    }
  }
  out.push(vertices[vertices.length - 1]);
  return out;
}

export function clipToBounds(
  vertices: number[][],
  width: number,
  height: number,
): number[][] {
  return vertices.map(([x, y]) => [
    Math.min(Math.max(x, 0), width - 1),
    Math.min(Math.max(y, 0), height - 1),
  ]);
}

export class AnnotationState {
  landmark: [number, number] | null = null;
  strokes: Stroke[] = [];
  private active: number[][] | null = null;
  private activeKind: ScribbleKind = "barrier";

  constructor(
    public width: number,
    public height: number,
  ) {}

  setLandmark(x: number, y: number): void {
    this.landmark = [Math.round(x), Math.round(y)];
  }

  get canSegment(): boolean {
    return this.landmark !== null || this.strokes.some((s) => s.kind === "foreground");
  }

  beginStroke(kind: ScribbleKind, x: number, y: number): void {
    this.activeKind = kind;
    this.active = [[x, y]];
  }

  extendStroke(x: number, y: number): void {
    if (this.active) this.active.push([x, y]);
  }

  endStroke(): Stroke | null {
    if (!this.active || this.active.length === 0) {
      this.active = null;
      return null;
    }
    const verts = clipToBounds(
      decimate(this.active),
      this.width,
      this.height,
    );
    const stroke = { kind: this.activeKind, vertices: verts };
    this.strokes.push(stroke);
    this.active = null;
    return stroke;
  }

  undo(): Stroke | null {
    return this.strokes.pop() ?? null;
  }

  byKind(kind: ScribbleKind): Stroke[] {
    return this.strokes.filter((s) => s.kind === kind);
  }
}
