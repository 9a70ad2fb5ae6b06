/** Typed client for the retrieval service with request cancellation. */

import type { HealthInfo, QueryResponse, SceneDetail } from "./types.js";

export class HttpError extends Error {
  constructor(
    public readonly status: number,
    public readonly url: string,
    public readonly detail: string,
  ) {
    super(`HTTP ${status} for ${url}: ${detail}`);
    this.name = "HttpError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // Bind to the global fetch lazily so tests can inject a mock server.
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const url = `${this.base}${path}`;
    const resp = await this.fetchFn(url, {
      headers: { Accept: "application/json", "Content-Type": "application/json" },
      ...init,
    });
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      body = null;
    }
    if (!resp.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : resp.statusText || "request failed";
      throw new HttpError(resp.status, url, detail);
    }
    return body as T;
  }

  /** POST /query. Pass a signal to make the request cancellable. */
  query(text: string, topN: number, signal?: AbortSignal): Promise<QueryResponse> {
    return this.request<QueryResponse>("/query", {
      method: "POST",
      body: JSON.stringify({ text, top_n: topN }),
      signal,
    });
  }

  /** GET /scenes/{id}; includeMasks opts into the RLE raster payloads. */
  scene(id: string, includeMasks = false, signal?: AbortSignal): Promise<SceneDetail> {
    const suffix = includeMasks ? "?include=masks" : "";
    return this.request<SceneDetail>(
      `/scenes/${encodeURIComponent(id)}${suffix}`,
      { signal },
    );
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("/health");
  }
}
