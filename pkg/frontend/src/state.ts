/** Dashboard state, fully URL-serializable so any view can be shared. */

export type Bucket = "day" | "week" | "month";

export interface DashboardState {
  from: string | null; // RFC 3339 or null = open
  to: string | null;
  bucket: Bucket;
  categories: string[]; // active category filters; empty = all
  threshold: number; // [0, 1]
  drillCategory: string | null;
  drillLimit: number;
}

export const DEFAULT_STATE: DashboardState = {
  from: null,
  to: null,
  bucket: "month",
  categories: [],
  threshold: 0.5,
  drillCategory: null,
  drillLimit: 10,
};

export function validateState(state: DashboardState): DashboardState {
  if (state.threshold < 0 || state.threshold > 1) {
    throw new Error(`threshold out of [0, 1]: ${state.threshold}`);
  }
  if (state.from && state.to && state.from > state.to) {
    throw new Error(`window not well-ordered: ${state.from} > ${state.to}`);
  }
  if (state.drillLimit < 1) {
    throw new Error(`drill-down limit must be >= 1: ${state.drillLimit}`);
  }
  return state;
}

export function stateToQuery(state: DashboardState): string {
  const params = new URLSearchParams();
  if (state.from) params.set("from", state.from);
  if (state.to) params.set("to", state.to);
  if (state.bucket !== DEFAULT_STATE.bucket) params.set("bucket", state.bucket);
  if (state.categories.length) params.set("categories", state.categories.join(","));
  if (state.threshold !== DEFAULT_STATE.threshold) params.set("threshold", String(state.threshold));
  if (state.drillCategory) params.set("drill", state.drillCategory);
  if (state.drillLimit !== DEFAULT_STATE.drillLimit) params.set("limit", String(state.drillLimit));
  return params.toString();
}

export function stateFromQuery(query: string): DashboardState {
  const params = new URLSearchParams(query);
  const bucket = (params.get("bucket") ?? DEFAULT_STATE.bucket) as Bucket;
  if (!["day", "week", "month"].includes(bucket)) {
    throw new Error(`unknown bucket in URL: ${bucket}`);
  }
  const state: DashboardState = {
    from: params.get("from"),
    to: params.get("to"),
    bucket,
    categories: params.get("categories")?.split(",").filter(Boolean) ?? [],
    threshold: params.has("threshold") ? Number(params.get("threshold")) : DEFAULT_STATE.threshold,
    drillCategory: params.get("drill"),
    drillLimit: params.has("limit") ? Number(params.get("limit")) : DEFAULT_STATE.drillLimit,
  };
  return validateState(state);
}
