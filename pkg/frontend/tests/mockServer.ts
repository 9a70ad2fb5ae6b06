/** Mock server fixture: a fetch-compatible function over canned routes,
 * with per-request manual release for in-flight ordering tests. */

import type { FetchLike } from "../src/api.js";
import type { QueryResponse, SceneDetail } from "../src/types.js";

export interface PendingRequest {
  url: string;
  body: unknown;
  release(): void;
  fail(err?: Error): void;
}

export interface MockServer {
  fetch: FetchLike;
  pending: PendingRequest[];
  /** Requests answered immediately unless hold=true. */
  hold: boolean;
  calls: { url: string; body: unknown }[];
}

function jsonResponse(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function queryFixture(ids: string[], latency = 2.5): QueryResponse {
  return {
    results: ids.map((id, rank) => ({
      id,
      score: 0.9 - 0.07 * rank,
      metadata: {
        id,
        track_id: `track-${id}`,
        frame_refs: [`synthetic://${id}/frame-00`],
        annotations: {
          motions: ["walk"],
          contexts: [["on", "crosswalk"]],
          simple: ["walking crosswalk"],
          sentences: [`A person is walking on a crosswalk (${id})`],
        },
      },
    })),
    latency_ms: latency,
  };
}

export function sceneFixture(id: string, withMasks = false): SceneDetail {
  const detail: SceneDetail = {
    id,
    track_id: `track-${id}`,
    frame_refs: [`synthetic://${id}/frame-00`, `synthetic://${id}/frame-01`],
    annotations: {
      motions: ["walk", "wave"],
      contexts: [
        ["on", "crosswalk"],
        ["next_to", "bus"],
      ],
      simple: ["walking crosswalk", "walking bus"],
      sentences: ["A person is walking on a crosswalk"],
    },
    image_dims: [4, 2],
    ground_truth: null,
  };
  if (withMasks) {
    // 4x2 raster: one run of class 1 (3 px), one of class 2 (5 px).
    const pairs = new Uint8Array(12);
    const view = new DataView(pairs.buffer);
    view.setUint16(0, 1, true);
    view.setUint32(2, 3, true);
    view.setUint16(6, 2, true);
    view.setUint32(8, 5, true);
    const b64 = btoa(String.fromCharCode(...pairs));
    detail.masks = {
      object: { rle: b64, classes: { "0": "void", "1": "person", "2": "car" } },
      ground: { rle: b64, classes: { "0": "void", "1": "road", "2": "sidewalk" } },
    };
  }
  return detail;
}

/** Routes: POST /query answers by queued responses (FIFO); GET /scenes/{id}
 * answers from the scenes map or 404. */
export function makeMockServer(options: {
  queryResponses?: (QueryResponse | { status: number; detail: string })[];
  scenes?: Record<string, SceneDetail>;
}): MockServer {
  const queue = [...(options.queryResponses ?? [])];
  const scenes = options.scenes ?? {};

  const server: MockServer = {
    hold: false,
    pending: [],
    calls: [],
    fetch: (url, init) => {
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      server.calls.push({ url, body });

      const respond = (): Response => {
        if (url.endsWith("/query")) {
          const next = queue.shift();
          if (!next) return jsonResponse(503, { detail: "no fixture response queued" });
          if ("status" in next && "detail" in next && !("results" in next)) {
            return jsonResponse(next.status, { detail: next.detail });
          }
          return jsonResponse(200, next);
        }
        const match = url.match(/\/scenes\/([^/?]+)/);
        if (match) {
          const scene = scenes[decodeURIComponent(match[1])];
          return scene
            ? jsonResponse(200, scene)
            : jsonResponse(404, { detail: `unknown scene '${match[1]}'` });
        }
        if (url.endsWith("/health")) {
          return jsonResponse(200, {
            status: "ok",
            index_size: Object.keys(scenes).length,
            model_version: "v1-test",
          });
        }
        return jsonResponse(404, { detail: `no route for ${url}` });
      };

      // Responses pair with requests in arrival order; holding only
      // delays delivery, it never reorders the pairing.
      const response = respond();
      if (!server.hold) {
        return Promise.resolve(response);
      }
      return new Promise<Response>((resolve, reject) => {
        server.pending.push({
          url,
          body,
          release: () => resolve(response),
          fail: (err) => reject(err ?? new Error("connection reset")),
        });
        // Honor cancellation like a real fetch would.
        init?.signal?.addEventListener("abort", () =>
          reject(new DOMException("The operation was aborted.", "AbortError")),
        );
      });
    },
  };
  return server;
}
