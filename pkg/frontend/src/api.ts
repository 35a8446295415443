/**
 * Typed client for the geoseg session service.
 *
 * All coordinates sent to the server are integer pixel coordinates in
 * image space, whatever the canvas zoom. The fetch implementation is
 * injectable so tests can run against an in-process mock.
 */

export interface Contour {
  closed: boolean;
  lifted: boolean;
  vertices: number[][];
}

export interface SegmentResponse {
  ok: boolean;
  error?: string;
  hint?: string;
  contour?: Contour;
  q?: number[];
  a?: number[];
  b?: number[];
  timings_ms?: Record<string, number>;
  intermediates?: string[];
}

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class GeosegClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async json<T>(url: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + url, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`);
    }
    return body as T;
  }

  async createSession(image: Blob): Promise<SessionInfo> {
    const form = new FormData();
    form.append("image", image, "image.pgm");
    const doc = await this.json<SessionInfo & { ok: boolean }>("/sessions", {
      method: "POST",
      body: form,
    });
    return { id: doc.id, width: doc.width, height: doc.height };
  }

  async putConfig(id: string, config: Record<string, unknown>): Promise<void> {
    await this.json(`/sessions/${id}/config`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  async postScribble(
    id: string,
    kind: "foreground" | "barrier",
    vertices: number[][],
  ): Promise<void> {
    const ints = vertices.map(([x, y]) => [Math.round(x), Math.round(y)]);
    await this.json(`/sessions/${id}/scribbles`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ type: kind, vertices: ints }),
    });
  }

  async clearScribbles(id: string): Promise<void> {
    await this.json(`/sessions/${id}/scribbles`, { method: "DELETE" });
  }

  async segment(id: string, seed?: [number, number]): Promise<SegmentResponse> {
    const body = seed
      ? { seed: [Math.round(seed[0]), Math.round(seed[1])] }
      : {};
    return this.json<SegmentResponse>(`/sessions/${id}/segment`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async getField(id: string, name: string): Promise<ArrayBuffer> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/sessions/${id}/fields/${name}`,
    );
    if (!resp.ok) {
      throw new ApiError(resp.status, `field ${name}: HTTP ${resp.status}`);
    }
    return resp.arrayBuffer();
  }

  async deleteSession(id: string): Promise<void> {
    await this.json(`/sessions/${id}`, { method: "DELETE" });
  }
}
