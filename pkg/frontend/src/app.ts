/** Application wiring: events -> API calls -> store -> render. */

import { ApiClient, HttpError } from "./api.js";
import { renderDetail, renderError, renderHistory, renderResults, renderStatus } from "./render.js";
import { QuerySequencer, Store } from "./state.js";
import type { HistoryEntry } from "./state.js";

export interface App {
  store: Store;
  submitQuery(text: string, topN: number): Promise<void>;
  openScene(id: string): Promise<void>;
  goBack(): void;
  root: HTMLElement;
}

function buildSkeleton(root: HTMLElement): Record<string, HTMLElement> {
  root.innerHTML = `
    <header class="topbar">
      <h1>context-motion scene explorer</h1>
      <form id="query-form">
        <input id="query-text" type="text" placeholder="A person is walking on the crosswalk"
               aria-label="query text" />
        <input id="query-topn" type="number" value="10" min="1" max="1000" aria-label="top n" />
        <button id="query-submit" type="submit">search</button>
      </form>
      <div id="status"></div>
    </header>
    <div id="error"></div>
    <main>
      <section id="results" class="result-grid"></section>
      <section id="detail" class="detail-pane" hidden></section>
      <aside id="history"></aside>
    </main>
  `;
  const pick = (id: string): HTMLElement => {
    const node = root.querySelector<HTMLElement>(`#${id}`);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  };
  return {
    form: pick("query-form"),
    text: pick("query-text"),
    topn: pick("query-topn"),
    status: pick("status"),
    error: pick("error"),
    results: pick("results"),
    detail: pick("detail"),
    history: pick("history"),
  };
}

export function createApp(root: HTMLElement, client: ApiClient): App {
  const store = new Store();
  const sequencer = new QuerySequencer();
  const dom = buildSkeleton(root);

  const resubmit = (entry: HistoryEntry): void => {
    (dom.text as HTMLInputElement).value = entry.text;
    (dom.topn as HTMLInputElement).value = String(entry.topN);
    void submitQuery(entry.text, entry.topN);
  };

  store.subscribe((state) => {
    renderError(dom.error, state.error);
    renderStatus(dom.status, state);
    renderHistory(dom.history, state.history, resubmit);
    if (state.view === "detail" && state.selectedScene) {
      dom.results.hidden = true;
      dom.detail.hidden = false;
      renderDetail(dom.detail, state.selectedScene, () => store.backToGrid());
    } else {
      dom.detail.hidden = true;
      dom.results.hidden = false;
      renderResults(dom.results, state.results, (id) => void openScene(id));
    }
  });

  async function submitQuery(text: string, topN: number): Promise<void> {
    if (!text.trim()) {
      store.applyError("enter a query first");
      return;
    }
    const { seq, signal } = sequencer.begin();
    store.update({ queryText: text, topN, inFlight: true, error: null });
    store.recordQuery(text, topN);
    try {
      const response = await client.query(text, topN, signal);
      if (!sequencer.isCurrent(seq)) return; // superseded; drop silently
      store.applyResults(response.results, response.latency_ms);
    } catch (err) {
      if (!sequencer.isCurrent(seq)) return; // stale failure: ignore
      if (err instanceof DOMException && err.name === "AbortError") return;
      store.applyError(describe(err));
    }
  }

  async function openScene(id: string): Promise<void> {
    try {
      const scene = await client.scene(id, true);
      store.openDetail(scene);
    } catch (err) {
      if (err instanceof HttpError && err.status === 404) {
        store.applyError(`scene ${id} not found`);
      } else {
        store.applyError(describe(err));
      }
    }
  }

  dom.form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = (dom.text as HTMLInputElement).value;
    const topN = Number((dom.topn as HTMLInputElement).value) || 10;
    void submitQuery(text, topN);
  });

  store.update({}); // initial paint
  return { store, submitQuery, openScene, goBack: () => store.backToGrid(), root };
}

function describe(err: unknown): string {
  if (err instanceof HttpError) return err.message;
  if (err instanceof Error) return `service unreachable: ${err.message}`;
  return String(err);
}
