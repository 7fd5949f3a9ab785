/** Controller: wires state, API client and views together.
 *
 * Concurrency: one UI thread, latest-wins. Each refresh bumps a token and
 * stale responses are dropped, so a slow request can never overwrite a
 * newer view. All state transitions round-trip through the URL. */

import { ApiClient, SummaryPayload, TimeseriesPayload } from "./api.js";
import { renderShareBars, renderTimeseries, renderTweetTable } from "./charts.js";
import { DashboardState, stateFromQuery, stateToQuery, validateState } from "./state.js";

export interface DashboardElements {
  bars: HTMLElement;
  timeseries: HTMLElement;
  table: HTMLElement;
  counters: HTMLElement;
  banner: HTMLElement;
  thresholdSlider: HTMLInputElement;
  thresholdValue: HTMLElement;
  bucketSelect: HTMLSelectElement;
  categorySelect: HTMLSelectElement;
}

export class Dashboard {
  private requestToken = 0;
  lastSummary: SummaryPayload | null = null;
  lastTimeseries: TimeseriesPayload | null = null;

  constructor(
    private api: ApiClient,
    private elements: DashboardElements,
    public state: DashboardState,
    private onStateChange: (query: string) => void = () => {},
  ) {}

  /** Fetch everything for the current state and render; stale responses
   * are discarded (latest wins). */
  async refresh(): Promise<void> {
    const token = ++this.requestToken;
    this.onStateChange(stateToQuery(this.state));
    const category = this.state.categories.length === 1 ? this.state.categories[0] : undefined;
    try {
      const [summary, timeseries, tweets] = await Promise.all([
        this.api.getSummary({
          from: this.state.from ?? undefined,
          to: this.state.to ?? undefined,
          category,
          limit: this.state.drillLimit,
        }),
        this.api.getTimeseries(this.state.bucket, {
          from: this.state.from ?? undefined,
          to: this.state.to ?? undefined,
          category,
        }),
        this.api.getTweets(this.state.drillCategory, this.state.drillLimit),
      ]);
      if (token !== this.requestToken) return; // superseded by a newer action
      this.lastSummary = summary;
      this.lastTimeseries = timeseries;
      this.clearError();
      renderShareBars(this.elements.bars, summary.quantification);
      renderTimeseries(this.elements.timeseries, timeseries.series, this.state.categories);
      renderTweetTable(this.elements.table, tweets.tweets);
      this.renderCounters(summary);
    } catch (err) {
      if (token !== this.requestToken) return;
      this.showError(err instanceof Error ? err.message : String(err));
    }
  }

  private renderCounters(summary: SummaryPayload): void {
    const counters = this.elements.counters;
    counters.replaceChildren();
    const entries: Array<[string, number]> = [
      ["posts in window", summary.total_tweets],
      ["flagged needs", summary.flagged_needs],
      ["threshold", summary.threshold],
    ];
    for (const [label, value] of entries) {
      const span = document.createElement("span");
      span.className = "counter";
      span.setAttribute("data-counter", label.replace(/ /g, "-"));
      span.setAttribute("data-value", String(value)); // verbatim API value
      span.textContent = `${label}: ${value}`;
      counters.appendChild(span);
    }
  }

  /** PUT the new threshold, then refetch; on rejection the slider reverts
   * and the error is shown. */
  async adjustThreshold(value: number): Promise<void> {
    const previous = this.state.threshold;
    try {
      const response = await this.api.putThreshold(value);
      this.state = validateState({ ...this.state, threshold: response.threshold });
      this.elements.thresholdSlider.value = String(response.threshold);
      this.elements.thresholdValue.textContent = response.threshold.toFixed(2);
      await this.refresh();
    } catch (err) {
      this.elements.thresholdSlider.value = String(previous);
      this.elements.thresholdValue.textContent = previous.toFixed(2);
      this.showError(err instanceof Error ? err.message : String(err));
    }
  }

  setBucket(bucket: "day" | "week" | "month"): Promise<void> {
    this.state = validateState({ ...this.state, bucket });
    return this.refresh();
  }

  setCategoryFilter(categories: string[]): Promise<void> {
    this.state = validateState({ ...this.state, categories, drillCategory: categories[0] ?? null });
    return this.refresh();
  }

  private showError(message: string): void {
    const banner = this.elements.banner;
    banner.hidden = false;
    banner.className = "error-banner";
    banner.textContent = `API unavailable: ${message} (showing stale data)`;
    banner.setAttribute("data-stale", "true");
  }

  private clearError(): void {
    const banner = this.elements.banner;
    banner.hidden = true;
    banner.textContent = "";
    banner.removeAttribute("data-stale");
  }
}

export function restoreState(query: string): DashboardState {
  return stateFromQuery(query);
}
