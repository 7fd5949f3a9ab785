/** Hand-rolled SVG views. Every rendered element carries the raw API
 * value in a data attribute, so "rendered numbers equal the payload" is a
 * direct DOM assertion, not a parse of pixel geometry. */

import { CATEGORY_IDS, Quantification, StoredTweetPayload } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const CATEGORY_TITLES: Record<string, string> = {
  price: "Price",
  car_characteristics: "Car characteristics",
  charging_infrastructure: "Charging infrastructure",
  range: "Range",
  charging_technology: "Charging technology",
  environment_health: "Environment & health",
  society: "Society",
  other: "Other",
};

function svg(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export function renderShareBars(container: HTMLElement, q: Quantification | null): void {
  container.replaceChildren();
  if (q === null || q.total_assignments === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no data in this window";
    container.appendChild(empty);
    return;
  }
  const width = 640;
  const barHeight = 22;
  const gap = 8;
  const labelWidth = 180;
  const height = CATEGORY_IDS.length * (barHeight + gap);
  const root = svg("svg", { width, height, role: "img" });
  root.setAttribute("data-total-assignments", String(q.total_assignments));
  CATEGORY_IDS.forEach((category, i) => {
    const share = q.shares[category] ?? 0;
    const count = q.counts[category] ?? 0;
    const y = i * (barHeight + gap);
    const bar = svg("rect", {
      x: labelWidth,
      y,
      width: Math.max(1, share * (width - labelWidth - 70)),
      height: barHeight,
      class: "share-bar",
      fill: "#4878a8",
    });
    bar.setAttribute("data-category", category);
    bar.setAttribute("data-share", String(share)); // verbatim API value
    bar.setAttribute("data-count", String(count));
    const label = svg("text", { x: 0, y: y + barHeight - 6, class: "bar-label" });
    label.textContent = CATEGORY_TITLES[category] ?? category;
    const value = svg("text", {
      x: labelWidth + Math.max(1, share * (width - labelWidth - 70)) + 6,
      y: y + barHeight - 6,
      class: "bar-value",
    });
    value.textContent = `${(share * 100).toFixed(1)}% (${count})`;
    root.append(bar, label, value);
  });
  container.appendChild(root);
}

export function renderTimeseries(
  container: HTMLElement,
  series: Quantification[],
  categories: string[],
): void {
  container.replaceChildren();
  if (!series.length) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no data in this window";
    container.appendChild(empty);
    return;
  }
  const active = categories.length ? categories : [...CATEGORY_IDS];
  const width = 640;
  const height = 220;
  const pad = 30;
  const maxCount = Math.max(
    1,
    ...series.flatMap((q) => active.map((c) => q.counts[c] ?? 0)),
  );
  const xStep = series.length > 1 ? (width - 2 * pad) / (series.length - 1) : 0;
  const root = svg("svg", { width, height, role: "img" });
  root.setAttribute("data-buckets", String(series.length));
  const palette = ["#4878a8", "#c44e52", "#55a868", "#8172b2", "#ccb974", "#64b5cd", "#8c8c8c", "#dd8452"];
  active.forEach((category, ci) => {
    const points = series.map((q, i) => {
      const count = q.counts[category] ?? 0;
      const x = pad + i * xStep;
      const y = height - pad - (count / maxCount) * (height - 2 * pad);
      return { x, y, count, bucket: q.bucket_start };
    });
    const path = svg("polyline", {
      points: points.map((p) => `${p.x},${p.y}`).join(" "),
      fill: "none",
      stroke: palette[ci % palette.length],
      "stroke-width": 2,
      class: "series-line",
    });
    path.setAttribute("data-category", category);
    root.appendChild(path);
    for (const p of points) {
      const dot = svg("circle", { cx: p.x, cy: p.y, r: 3, fill: palette[ci % palette.length] });
      dot.setAttribute("data-category", category);
      dot.setAttribute("data-count", String(p.count)); // verbatim API value
      dot.setAttribute("data-bucket", p.bucket);
      root.appendChild(dot);
    }
  });
  container.appendChild(root);
}

export function renderTweetTable(container: HTMLElement, tweets: StoredTweetPayload[]): void {
  container.replaceChildren();
  if (!tweets.length) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no matching posts";
    container.appendChild(empty);
    return;
  }
  const table = document.createElement("table");
  table.className = "tweet-table";
  const head = document.createElement("tr");
  for (const title of ["Text", "Score", "Categories", "Sentiment", "Gender"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const entry of tweets) {
    const row = document.createElement("tr");
    row.className = "tweet-row";
    row.setAttribute("data-score", String(entry.need_score)); // verbatim API value
    row.setAttribute("data-tweet-id", entry.tweet.id);
    const cells = [
      entry.tweet.text,
      entry.need_score.toFixed(3),
      entry.assignment ? entry.assignment.categories.join(", ") : "-",
      entry.sentiment ? `+${entry.sentiment[0]} / -${entry.sentiment[1]}` : "-",
      entry.gender ?? "-",
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      row.appendChild(td);
    }
    table.appendChild(row);
  }
  container.appendChild(table);
}
