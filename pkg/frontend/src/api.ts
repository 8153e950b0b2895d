// Thin typed client for the control service. All state the UI displays comes
// back through the event stream; these calls only send commands.

import { PathFile, Point, SessionConfig } from "./types.js";

export interface PostLike {
  (url: string, body: unknown): Promise<Response>;
}

const jsonPost: PostLike = (url, body) =>
  fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });

export class ServiceClient {
  constructor(
    public readonly base = "",
    private readonly post: PostLike = jsonPost,
  ) {}

  async createSession(overrides: Record<string, unknown> = {}): Promise<string> {
    const r = await this.post(`${this.base}/sessions`, overrides);
    if (!r.ok) throw new Error(`create session failed: ${r.status}`);
    return ((await r.json()) as { id: string }).id;
  }

  async config(id: string): Promise<SessionConfig> {
    const r = await fetch(`${this.base}/sessions/${id}/config`);
    if (!r.ok) throw new Error(`config fetch failed: ${r.status}`);
    return (await r.json()) as SessionConfig;
  }

  setTarget(id: string, point: Point): Promise<Response> {
    return this.post(`${this.base}/sessions/${id}/target`, {
      x_mm: point[0],
      y_mm: point[1],
    });
  }

  /** Post an already-resampled polyline verbatim. */
  setPath(id: string, points: Point[]): Promise<Response> {
    return this.post(`${this.base}/sessions/${id}/path`, { points, resample: false });
  }

  setParams(
    id: string,
    params: { current_a?: number; preset?: string; weights?: Record<string, number> },
  ): Promise<Response> {
    return this.post(`${this.base}/sessions/${id}/params`, params);
  }

  pause(id: string): Promise<Response> {
    return this.post(`${this.base}/sessions/${id}/pause`, {});
  }

  resume(id: string): Promise<Response> {
    return this.post(`${this.base}/sessions/${id}/resume`, {});
  }

  reset(id: string): Promise<Response> {
    return this.post(`${this.base}/sessions/${id}/reset`, {});
  }

  async fetchPresetPath(name: string): Promise<PathFile> {
    const r = await fetch(`${this.base}/paths/${name}.json`);
    if (!r.ok) throw new Error(`preset path ${name} not found`);
    return (await r.json()) as PathFile;
  }

  streamUrl(id: string): string {
    return `${this.base}/sessions/${id}/stream`;
  }
}
