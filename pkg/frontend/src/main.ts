/** Entry point: mount the explorer against a configurable base URL.
 *
 * Resolution order: ?api= query parameter, then the CMR_API global,
 * then same-origin port 8080.
 */

import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

declare global {
  interface Window {
    CMR_API?: string;
  }
}

function resolveBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  if (fromQuery) return fromQuery;
  if (window.CMR_API) return window.CMR_API;
  return `${window.location.protocol}//${window.location.hostname}:8080`;
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
const app = createApp(root, new ApiClient(resolveBaseUrl()));

// Surface service health in the tab title.
void (async () => {
  try {
    const health = await new ApiClient(resolveBaseUrl()).health();
    document.title = `scene explorer (${health.status}, ${health.index_size} scenes)`;
  } catch {
    document.title = "scene explorer (service offline)";
  }
})();

export { app };
