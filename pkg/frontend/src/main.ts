/** Browser bootstrap: read state from the URL, wire controls, start. */

import { ApiClient, CATEGORY_IDS } from "./api.js";
import { Dashboard, DashboardElements } from "./app.js";
import { DEFAULT_STATE, stateFromQuery } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function bootstrap(): Dashboard {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? window.location.origin;
  let state = DEFAULT_STATE;
  try {
    state = stateFromQuery(window.location.search.replace(/^\?/, ""));
  } catch {
    // a malformed shared URL falls back to the defaults
  }

  const elements: DashboardElements = {
    bars: byId("share-bars"),
    timeseries: byId("timeseries"),
    table: byId("drill-down"),
    counters: byId("counters"),
    banner: byId("error-banner"),
    thresholdSlider: byId<HTMLInputElement>("threshold-slider"),
    thresholdValue: byId("threshold-value"),
    bucketSelect: byId<HTMLSelectElement>("bucket-select"),
    categorySelect: byId<HTMLSelectElement>("category-select"),
  };

  for (const category of CATEGORY_IDS) {
    const option = document.createElement("option");
    option.value = category;
    option.textContent = category;
    elements.categorySelect.appendChild(option);
  }

  const dashboard = new Dashboard(
    new ApiClient(baseUrl),
    elements,
    state,
    (query) => window.history.replaceState(null, "", query ? `?${query}` : "?"),
  );

  elements.thresholdSlider.value = String(state.threshold);
  elements.thresholdValue.textContent = state.threshold.toFixed(2);
  elements.thresholdSlider.addEventListener("change", () => {
    void dashboard.adjustThreshold(Number(elements.thresholdSlider.value));
  });
  elements.bucketSelect.value = state.bucket;
  elements.bucketSelect.addEventListener("change", () => {
    void dashboard.setBucket(elements.bucketSelect.value as "day" | "week" | "month");
  });
  elements.categorySelect.addEventListener("change", () => {
    const value = elements.categorySelect.value;
    void dashboard.setCategoryFilter(value ? [value] : []);
  });

  void dashboard.refresh();
  return dashboard;
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("share-bars")) {
  bootstrap();
}
