/**
 * Session store driving the interactive loop: one in-flight segmentation
 * at a time, with a history of results for A/B toggling after barrier
 * edits. The numerical state always round-trips through the service; the
 * client never mutates segmentation data.
 */

import { Contour, GeosegClient, SegmentResponse } from "./api.js";
import { AnnotationState, Stroke } from "./annotations.js";

export interface HistoryEntry {
  label: string;
  contour: Contour;
  barrierCount: number;
  timestamp: number;
}

export class SessionStore {
  sessionId: string | null = null;
  annotations: AnnotationState | null = null;
  history: HistoryEntry[] = [];
  activeHistory = -1;
  lastError: string | null = null;
  private inFlight = false;

  constructor(private client: GeosegClient) {}

  get busy(): boolean {
    return this.inFlight;
  }

  get activeContour(): Contour | null {
    if (this.activeHistory < 0 || this.activeHistory >= this.history.length) {
      return null;
    }
    return this.history[this.activeHistory].contour;
  }

  async open(image: Blob): Promise<void> {
    const info = await this.client.createSession(image);
    this.sessionId = info.id;
    this.annotations = new AnnotationState(info.width, info.height);
    this.history = [];
    this.activeHistory = -1;
  }

  async configure(config: Record<string, unknown>): Promise<void> {
    if (!this.sessionId) throw new Error("no session");
    await this.client.putConfig(this.sessionId, config);
  }

  async pushStroke(stroke: Stroke): Promise<void> {
    if (!this.sessionId) throw new Error("no session");
    await this.client.postScribble(this.sessionId, stroke.kind, stroke.vertices);
  }

  /** Re-sync all scribbles after an undo (the server holds a flat list). */
  async resyncScribbles(): Promise<void> {
    if (!this.sessionId || !this.annotations) throw new Error("no session");
    await this.client.clearScribbles(this.sessionId);
    for (const s of this.annotations.strokes) {
      await this.client.postScribble(this.sessionId, s.kind, s.vertices);
    }
  }

  async segment(): Promise<SegmentResponse> {
    if (!this.sessionId || !this.annotations) throw new Error("no session");
    if (this.inFlight) {
      return { ok: false, error: "a segmentation is already running" };
    }
    if (!this.annotations.canSegment) {
      return { ok: false, error: "set the landmark point first" };
    }
    this.inFlight = true;
    try {
      const seed = this.annotations.landmark ?? undefined;
      const resp = await this.client.segment(this.sessionId, seed ?? undefined);
      if (resp.ok && resp.contour) {
        this.history.push({
          label: `run ${this.history.length + 1}`,
          contour: resp.contour,
          barrierCount: this.annotations.byKind("barrier").length,
          timestamp: Date.now(),
        });
        this.activeHistory = this.history.length - 1;
        this.lastError = null;
      } else {
        this.lastError = resp.hint
          ? `${resp.error} (${resp.hint})`
          : (resp.error ?? "unknown failure");
      }
      return resp;
    } finally {
      this.inFlight = false;
    }
  }

  toggleHistory(index: number): Contour | null {
    if (index < 0 || index >= this.history.length) return null;
    this.activeHistory = index;
    return this.history[index].contour;
  }
}

/** True when no contour vertex lands on a pixel covered by the stroke. */
export function contourAvoidsStroke(
  contour: Contour,
  stroke: Stroke,
  radius = 0.5,
): boolean {
  const pixels = new Set<string>();
  const verts = stroke.vertices;
  for (let i = 0; i + 1 < verts.length; i++) {
    const [x1, y1] = verts[i];
    const [x2, y2] = verts[i + 1];
    const steps = Math.max(2, Math.ceil(4 * Math.hypot(x2 - x1, y2 - y1)));
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      pixels.add(
        `${Math.round(x1 + t * (x2 - x1))},${Math.round(y1 + t * (y2 - y1))}`,
      );
    }
  }
  if (verts.length === 1) {
    pixels.add(`${Math.round(verts[0][0])},${Math.round(verts[0][1])}`);
  }
  for (const [x, y] of contour.vertices) {
    if (pixels.has(`${Math.round(x)},${Math.round(y)}`)) return false;
  }
  return true;
}
