/** UI state container. All views derive from (history, last response);
 * the store never mutates server state. */

import type { QueryResult, SceneDetail } from "./types.js";

export interface HistoryEntry {
  text: string;
  topN: number;
  at: number; // epoch ms
}

export type View = "grid" | "detail";

export interface UIState {
  queryText: string;
  topN: number;
  results: QueryResult[]; // mirrors the last successful QueryResponse
  latencyMs: number | null;
  selectedScene: SceneDetail | null;
  history: HistoryEntry[]; // most recent first, append-only per session
  error: string | null;
  view: View;
  inFlight: boolean;
}

export function initialState(): UIState {
  return {
    queryText: "",
    topN: 10,
    results: [],
    latencyMs: null,
    selectedScene: null,
    history: [],
    error: null,
    view: "grid",
    inFlight: false,
  };
}

export type Listener = (state: UIState) => void;

/** Tiny observable store; every transition notifies subscribers. */
export class Store {
  private state: UIState = initialState();
  private listeners: Listener[] = [];

  get(): UIState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<UIState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  recordQuery(text: string, topN: number, now = Date.now()): void {
    this.update({
      history: [{ text, topN, at: now }, ...this.state.history],
    });
  }

  applyResults(results: QueryResult[], latencyMs: number): void {
    this.update({
      results,
      latencyMs,
      error: null,
      view: "grid",
      inFlight: false,
    });
  }

  applyError(message: string): void {
    // Results and history are preserved so the user can retry.
    this.update({ error: message, inFlight: false });
  }

  openDetail(scene: SceneDetail): void {
    this.update({ selectedScene: scene, view: "detail", error: null });
  }

  backToGrid(): void {
    this.update({ selectedScene: null, view: "grid" });
  }
}

/** Serializes queries: one in flight at a time, stale responses dropped.
 *
 * Each submission takes the next sequence number and aborts the previous
 * request; a response only lands if its number is still the latest, so a
 * superseded response can never overwrite newer results.
 */
export class QuerySequencer {
  private seq = 0;
  private controller: AbortController | null = null;

  begin(): { seq: number; signal: AbortSignal } {
    this.controller?.abort();
    this.controller = new AbortController();
    this.seq += 1;
    return { seq: this.seq, signal: this.controller.signal };
  }

  isCurrent(seq: number): boolean {
    return seq === this.seq;
  }
}
