/** Shared test scaffolding: DOM skeleton and a stateful mock API. */

import { ApiClient, CATEGORY_IDS, Quantification, StoredTweetPayload } from "../src/api";
import { DashboardElements } from "../src/app";

export const APPENDIX_COUNTS: Record<string, number> = {
  price: 202,
  car_characteristics: 145,
  charging_infrastructure: 305,
  range: 135,
  charging_technology: 119,
  environment_health: 71,
  society: 283,
  other: 109,
};

export function appendixQuantification(): Quantification {
  const total = Object.values(APPENDIX_COUNTS).reduce((a, b) => a + b, 0);
  const shares: Record<string, number> = {};
  for (const [category, count] of Object.entries(APPENDIX_COUNTS)) {
    shares[category] = count / total;
  }
  return {
    bucket_start: "2021-07-01T00:00:00+00:00",
    counts: { ...APPENDIX_COUNTS },
    shares,
    total_assignments: total,
    total_tweets: 1093,
  };
}

export function makeElements(): DashboardElements {
  document.body.innerHTML = `
    <div id="error-banner" hidden></div>
    <input id="threshold-slider" type="range" min="0" max="1" step="0.01">
    <span id="threshold-value"></span>
    <select id="bucket-select"></select>
    <select id="category-select"></select>
    <div id="counters"></div>
    <div id="share-bars"></div>
    <div id="timeseries"></div>
    <div id="drill-down"></div>
  `;
  const byId = (id: string) => document.getElementById(id)! as HTMLElement;
  return {
    bars: byId("share-bars"),
    timeseries: byId("timeseries"),
    table: byId("drill-down"),
    counters: byId("counters"),
    banner: byId("error-banner"),
    thresholdSlider: byId("threshold-slider") as HTMLInputElement,
    thresholdValue: byId("threshold-value"),
    bucketSelect: byId("bucket-select") as HTMLSelectElement,
    categorySelect: byId("category-select") as HTMLSelectElement,
  };
}

export interface MockApiOptions {
  scores?: number[]; // stored need scores driving flagged_needs
  quantification?: Quantification | null;
  series?: Quantification[];
  failing?: boolean;
}

/** In-memory stand-in for the service with a mutable threshold. */
export class MockApi {
  threshold = 0.5;
  requests: string[] = [];

  constructor(private options: MockApiOptions = {}) {}

  private tweets(): StoredTweetPayload[] {
    const scores = this.options.scores ?? [0.95, 0.9, 0.8, 0.7, 0.6];
    return scores
      .filter((s) => s > this.threshold)
      .sort((a, b) => b - a)
      .map((score, i) => ({
        tweet: { id: `m${i}`, text: `post ${i}`, created_at: "2021-07-02T10:00:00+00:00" },
        need_score: score,
        is_need: true,
        assignment: { categories: ["range"], scores: { range: score } },
        sentiment: [1, 2] as [number, number],
        gender: i % 2 ? "female" : "male",
      }));
  }

  fetch = async (url: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const href = String(url);
    this.requests.push(href);
    if (this.options.failing) {
      return new Response(JSON.stringify({ error: "backend down" }), { status: 503 });
    }
    const path = new URL(href, "http://mock").pathname;
    if (path.endsWith("/healthz")) {
      return new Response("ok", { status: 200 });
    }
    if (path.endsWith("/config/threshold")) {
      const body = JSON.parse(String(init?.body ?? "{}"));
      if (typeof body.value !== "number" || body.value < 0 || body.value > 1) {
        return new Response(JSON.stringify({ error: "threshold out of range" }), { status: 400 });
      }
      this.threshold = body.value;
      return new Response(JSON.stringify({ threshold: this.threshold }), { status: 200 });
    }
    if (path.endsWith("/needs/summary")) {
      const flagged = this.tweets();
      const payload = {
        window: { from: null, to: null },
        threshold: this.threshold,
        total_tweets: (this.options.scores ?? [0.95, 0.9, 0.8, 0.7, 0.6]).length,
        flagged_needs: flagged.length,
        quantification:
          this.options.quantification !== undefined ? this.options.quantification : appendixQuantification(),
        top_tweets: flagged,
      };
      return new Response(JSON.stringify(payload), { status: 200 });
    }
    if (path.endsWith("/needs/timeseries")) {
      const params = new URL(href, "http://mock").searchParams;
      const series = this.options.series ?? [appendixQuantification()];
      return new Response(
        JSON.stringify({ bucket: params.get("bucket") ?? "month", series }),
        { status: 200 },
      );
    }
    if (path.endsWith("/tweets")) {
      const params = new URL(href, "http://mock").searchParams;
      const limit = Number(params.get("limit") ?? 20);
      return new Response(JSON.stringify({ tweets: this.tweets().slice(0, limit) }), { status: 200 });
    }
    return new Response(JSON.stringify({ error: "unknown route" }), { status: 404 });
  };

  client(): ApiClient {
    return new ApiClient("http://mock", this.fetch);
  }
}

export { CATEGORY_IDS };
