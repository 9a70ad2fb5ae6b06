/** DOM rendering. Pure functions of the UI state; no fetching in here. */

import { maskLegend, decodeRle, renderMaskOverlay } from "./masks.js";
import type { HistoryEntry, UIState } from "./state.js";
import type { QueryResult, SceneDetail } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderError(container: HTMLElement, message: string | null): void {
  container.innerHTML = "";
  if (!message) return;
  const banner = el("div", "error-banner", message);
  banner.setAttribute("role", "alert");
  container.appendChild(banner);
}

/** Ranked result cards, strictly in response order. */
export function renderResults(
  container: HTMLElement,
  results: QueryResult[],
  onOpen: (id: string) => void,
): void {
  container.innerHTML = "";
  if (results.length === 0) {
    container.appendChild(el("p", "empty-note", "No results yet. Submit a query."));
    return;
  }
  for (const [rank, result] of results.entries()) {
    const card = el("article", "result-card");
    card.dataset.sceneId = result.id;

    const header = el("header", "card-header");
    header.appendChild(el("span", "card-rank", `#${rank + 1}`));
    header.appendChild(el("span", "card-id", result.id));
    header.appendChild(el("span", "card-score", result.score.toFixed(3)));
    card.appendChild(header);

    const thumbRef = result.metadata?.frame_refs?.[0];
    if (thumbRef) {
      card.appendChild(el("div", "card-thumb", thumbRef));
    }
    const simple = result.metadata?.annotations?.simple ?? [];
    if (simple.length) {
      const labels = el("ul", "card-labels");
      for (const label of simple.slice(0, 3)) {
        labels.appendChild(el("li", undefined, label));
      }
      card.appendChild(labels);
    }
    const open = el("button", "card-open", "open scene");
    open.addEventListener("click", () => onOpen(result.id));
    card.appendChild(open);
    container.appendChild(card);
  }
}

export function renderDetail(
  container: HTMLElement,
  scene: SceneDetail,
  onBack: () => void,
): void {
  container.innerHTML = "";
  const back = el("button", "detail-back", "back to results");
  back.addEventListener("click", onBack);
  container.appendChild(back);

  container.appendChild(el("h2", "detail-id", scene.id));
  container.appendChild(el("p", "detail-track", `track ${scene.track_id}`));

  const ann = scene.annotations;
  if (ann) {
    container.appendChild(el("h3", undefined, "motions"));
    container.appendChild(el("p", "detail-motions", ann.motions.join(", ")));
    container.appendChild(el("h3", undefined, "context labels"));
    const ctx = el("ul", "detail-contexts");
    for (const [relation, cls] of ann.contexts) {
      ctx.appendChild(el("li", undefined, `${relation.replaceAll("_", " ")} ${cls}`));
    }
    container.appendChild(ctx);
    container.appendChild(el("h3", undefined, "annotations"));
    const sentences = el("ul", "detail-sentences");
    for (const s of ann.sentences.slice(0, 8)) {
      sentences.appendChild(el("li", undefined, s));
    }
    container.appendChild(sentences);
  }

  container.appendChild(el("h3", undefined, "frames"));
  const frames = el("ol", "detail-frames");
  for (const ref of scene.frame_refs.slice(0, 5)) {
    frames.appendChild(el("li", undefined, ref));
  }
  container.appendChild(frames);

  if (scene.masks) {
    const [width, height] = scene.image_dims;
    for (const [name, payload] of Object.entries(scene.masks)) {
      container.appendChild(el("h3", undefined, `${name} mask`));
      const canvas = el("canvas", "mask-overlay");
      canvas.dataset.mask = name;
      const painted = renderMaskOverlay(canvas, payload, width, height);
      container.appendChild(canvas);
      const legend = el("ul", "mask-legend");
      const raster = decodeRle(payload.rle, width, height);
      for (const entry of maskLegend(raster, payload.classes)) {
        const item = el("li", undefined, entry.name);
        item.style.borderLeft = `12px solid ${entry.color}`;
        legend.appendChild(item);
      }
      container.appendChild(legend);
      if (!painted) {
        container.appendChild(
          el("p", "mask-noncanvas", "(canvas unavailable; legend lists present classes)"),
        );
      }
    }
  }
}

export function renderHistory(
  container: HTMLElement,
  history: HistoryEntry[],
  onResubmit: (entry: HistoryEntry) => void,
): void {
  container.innerHTML = "";
  if (!history.length) return;
  container.appendChild(el("h3", undefined, "history"));
  const list = el("ol", "history-list");
  for (const entry of history) {
    const item = el("li", "history-item");
    const button = el("button", "history-resubmit", `${entry.text} (top ${entry.topN})`);
    button.addEventListener("click", () => onResubmit(entry));
    item.appendChild(button);
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderStatus(container: HTMLElement, state: UIState): void {
  container.innerHTML = "";
  if (state.inFlight) {
    container.appendChild(el("span", "status-busy", "querying..."));
  } else if (state.latencyMs !== null) {
    container.appendChild(
      el("span", "status-latency", `${state.results.length} results in ${state.latencyMs.toFixed(1)} ms`),
    );
  }
}
