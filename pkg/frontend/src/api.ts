/** Typed client for the needminer REST API. The dashboard never
 * recomputes shares or counts; whatever this client returns is rendered
 * verbatim. */

export const CATEGORY_IDS = [
  "price",
  "car_characteristics",
  "charging_infrastructure",
  "range",
  "charging_technology",
  "environment_health",
  "society",
  "other",
] as const;

export type CategoryId = (typeof CATEGORY_IDS)[number];

export interface Quantification {
  bucket_start: string;
  counts: Record<string, number>;
  shares: Record<string, number>;
  total_assignments: number;
  total_tweets: number;
}

export interface StoredTweetPayload {
  tweet: {
    id: string;
    text: string;
    created_at: string | null;
    author_name?: string | null;
  };
  need_score: number;
  is_need: boolean;
  assignment: { categories: string[]; scores: Record<string, number> } | null;
  sentiment: [number, number] | null;
  gender: string | null;
}

export interface SummaryPayload {
  window: { from: string | null; to: string | null };
  threshold: number;
  total_tweets: number;
  flagged_needs: number;
  quantification: Quantification | null;
  top_tweets: StoredTweetPayload[];
}

export interface TimeseriesPayload {
  bucket: string;
  series: Quantification[];
}

export interface SummaryQuery {
  from?: string;
  to?: string;
  category?: string;
  minScore?: number;
  limit?: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string, private fetchFn: typeof fetch = fetch) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.error === "string") detail = body.error;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getSummary(query: SummaryQuery = {}): Promise<SummaryPayload> {
    const params = new URLSearchParams();
    if (query.from) params.set("from", query.from);
    if (query.to) params.set("to", query.to);
    if (query.category) params.set("category", query.category);
    if (query.minScore !== undefined) params.set("min_score", String(query.minScore));
    if (query.limit !== undefined) params.set("limit", String(query.limit));
    const qs = params.toString();
    return this.request<SummaryPayload>(`/api/v1/needs/summary${qs ? `?${qs}` : ""}`);
  }

  getTimeseries(bucket: string, query: SummaryQuery = {}): Promise<TimeseriesPayload> {
    const params = new URLSearchParams({ bucket });
    if (query.from) params.set("from", query.from);
    if (query.to) params.set("to", query.to);
    if (query.category) params.set("category", query.category);
    return this.request<TimeseriesPayload>(`/api/v1/needs/timeseries?${params.toString()}`);
  }

  getTweets(category: string | null, limit: number): Promise<{ tweets: StoredTweetPayload[] }> {
    const params = new URLSearchParams({ limit: String(limit) });
    if (category) params.set("category", category);
    return this.request<{ tweets: StoredTweetPayload[] }>(`/api/v1/tweets?${params.toString()}`);
  }

  putThreshold(value: number): Promise<{ threshold: number }> {
    return this.request<{ threshold: number }>("/api/v1/config/threshold", {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ value }),
    });
  }

  health(): Promise<string> {
    return this.fetchFn(`${this.baseUrl}/healthz`).then((r) => r.text());
  }
}
