/** Integration against a live backend.
 *
 * Start the service (`needminer serve --config ...`), then run:
 *     NEEDMINER_API=http://127.0.0.1:8080 npm run test:integration
 * Skipped when NEEDMINER_API is unset.
 */
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { Dashboard } from "../src/app";
import { DEFAULT_STATE } from "../src/state";
import { makeElements } from "./helpers";

const API_URL = process.env.NEEDMINER_API;

describe.skipIf(!API_URL)("against the real API", () => {
  it("is alive", async () => {
    const api = new ApiClient(API_URL!);
    expect(await api.health()).toBe("ok");
  });

  it("renders bars equal to the live payload", async () => {
    const api = new ApiClient(API_URL!);
    const dashboard = new Dashboard(api, makeElements(), { ...DEFAULT_STATE });
    await dashboard.refresh();
    const summary = dashboard.lastSummary!;
    if (summary.quantification === null) {
      expect(document.querySelector("#share-bars .empty-state")).not.toBeNull();
      return;
    }
    for (const bar of document.querySelectorAll(".share-bar")) {
      const category = bar.getAttribute("data-category")!;
      expect(bar.getAttribute("data-share")).toBe(
        String(summary.quantification.shares[category] ?? 0),
      );
    }
  });

  it("threshold round-trip is monotone on the live store", async () => {
    const api = new ApiClient(API_URL!);
    const dashboard = new Dashboard(api, makeElements(), { ...DEFAULT_STATE });
    await dashboard.refresh();
    const counts: number[] = [];
    for (const value of [0.2, 0.5, 0.8]) {
      await dashboard.adjustThreshold(value);
      counts.push(dashboard.lastSummary!.flagged_needs);
    }
    expect(counts[1]).toBeLessThanOrEqual(counts[0]);
    expect(counts[2]).toBeLessThanOrEqual(counts[1]);
    await dashboard.adjustThreshold(0.5); // restore the default
  });
});
