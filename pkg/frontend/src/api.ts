import type { FoilResponse, MapCatalog, SessionConfig, SessionPayload } from "./types";

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : detailMessage(detail) ?? `HTTP ${status}`);
    this.status = status;
    this.detail = detail;
  }
}

function detailMessage(detail: unknown): string | null {
  if (detail && typeof detail === "object" && "message" in detail) {
    const m = (detail as { message: unknown }).message;
    if (typeof m === "string") return m;
  }
  return null;
}

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/**
 * Thin typed client for the session service. All verdict content (rendered
 * sentences, confidences, traces) passes through untouched — the engine is
 * the single source of truth and this class never post-processes it.
 */
export class ApiClient {
  base: string;
  pollIntervalMs: number;

  constructor(base = "", pollIntervalMs = 400) {
    this.base = base.replace(/\/$/, "");
    this.pollIntervalMs = pollIntervalMs;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    if (res.status === 202) {
      // the server is running with a compute cap; poll for the result
      const body = (await res.json()) as { poll: string };
      return this.poll<T>(body.poll);
    }
    if (!res.ok) {
      let detail: unknown = null;
      try {
        detail = ((await res.json()) as { detail?: unknown }).detail ?? null;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  private async poll<T>(token: string): Promise<T> {
    for (;;) {
      const res = await fetch(`${this.base}/polls/${token}`);
      if (res.status === 202) {
        await sleep(this.pollIntervalMs);
        continue;
      }
      if (!res.ok) throw new ApiError(res.status, null);
      return (await res.json()) as T;
    }
  }

  maps(): Promise<MapCatalog> {
    return this.request<MapCatalog>("/maps");
  }

  createSession(
    mapId: string,
    opts: { variant?: string; seed?: number; config?: Partial<SessionConfig> } = {},
  ): Promise<SessionPayload> {
    const body: Record<string, unknown> = { map_id: mapId };
    if (opts.variant !== undefined) body.variant = opts.variant;
    if (opts.seed !== undefined) body.seed = opts.seed;
    if (opts.config !== undefined) body.config = opts.config;
    return this.request<SessionPayload>("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.request<SessionPayload>(`/sessions/${sessionId}`);
  }

  submitFoil(sessionId: string, actions: string[]): Promise<FoilResponse> {
    return this.request<FoilResponse>(`/sessions/${sessionId}/foils`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ actions }),
    });
  }
}
