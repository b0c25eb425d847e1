/** Fig-4-style chart renderers.
 *
 * Every series embeds its plotted numbers in a `data-values` attribute,
 * so tests can verify the rendering never alters or reorders the data.
 */

import { LinkRow, SystemRow } from "./csv.js";
import { linearScale, logScale } from "./scales.js";
import { SvgDoc } from "./svg.js";

const SERIES_COLORS = ["#c0392b", "#2c3e50", "#2980b9", "#27ae60", "#8e44ad"];
const WIDTH = 640;
const HEIGHT = 460;
const MARGIN = { left: 70, right: 20, top: 28, bottom: 48 };

export const PER_FLOOR = 1e-5;

export function serializeValues(values: number[]): string {
  return values.map((v) => (Number.isNaN(v) ? "nan" : String(v))).join(";");
}

/** Log-scale PER vs SNR curves, one series per codec. */
export function renderPerCurves(rows: LinkRow[]): string {
  const codecs: string[] = [];
  for (const row of rows) {
    if (!codecs.includes(row.codec)) codecs.push(row.codec);
  }
  const snrs = rows.map((row) => row.snrDb);
  const floor = Math.min(PER_FLOOR, ...rows.filter((r) => r.per > 0).map((r) => r.per));
  const x = linearScale(
    [Math.min(...snrs), Math.max(...snrs)],
    [MARGIN.left, WIDTH - MARGIN.right],
  );
  const y = logScale([floor, 1.0], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const doc = new SvgDoc(WIDTH, HEIGHT);
  doc.rect(0, 0, WIDTH, HEIGHT, { fill: "white" });
  for (const tick of y.ticks()) {
    const py = y(tick);
    doc.line(MARGIN.left, py, WIDTH - MARGIN.right, py, {
      stroke: "#dddddd",
      "stroke-width": 1,
    });
    doc.text(8, py + 4, `1e${Math.round(Math.log10(tick))}`);
  }
  for (const tick of x.ticks()) {
    const px = x(tick);
    doc.line(px, HEIGHT - MARGIN.bottom, px, MARGIN.top, {
      stroke: "#eeeeee",
      "stroke-width": 1,
    });
    doc.text(px - 8, HEIGHT - MARGIN.bottom + 16, String(tick));
  }
  doc.text(WIDTH / 2 - 30, HEIGHT - 10, "SNR (dB)");
  doc.text(10, 16, "PER");

  codecs.forEach((codec, ci) => {
    const series = rows.filter((row) => row.codec === codec);
    const pts: Array<[number, number]> = series.map((row) => [
      x(row.snrDb),
      y(Math.max(row.per, floor)),
    ]);
    const color = SERIES_COLORS[ci % SERIES_COLORS.length];
    doc.polyline(pts, {
      stroke: color,
      "stroke-width": 2,
      "data-series": codec,
      "data-values": serializeValues(series.flatMap((row) => [row.snrDb, row.per])),
    });
    series.forEach((row, i) => {
      const marker = row.per > 0 ? "circle" : "floor";
      if (marker === "circle") {
        doc.circle(pts[i][0], pts[i][1], 3, { fill: color });
      } else {
        doc.text(pts[i][0] - 3, pts[i][1], "x", { fill: color });
      }
    });
    doc.text(WIDTH - MARGIN.right - 120, MARGIN.top + 16 * (ci + 1), codec, {
      fill: color,
    });
  });
  return doc.render();
}

export interface GroupedBar {
  label: string;
  throughputMbps: number;
  latencyMs: number; // NaN when the group carries no URLLC traffic
}

export function groupSystemRows(rows: SystemRow[]): GroupedBar[] {
  const order: string[] = [];
  const acc = new Map<string, { thr: number[]; lat: number[] }>();
  for (const row of rows) {
    const key = `${row.scheme}/${row.policy}`;
    if (!acc.has(key)) {
      acc.set(key, { thr: [], lat: [] });
      order.push(key);
    }
    const slot = acc.get(key)!;
    slot.thr.push(row.embbThroughputBps);
    if (!Number.isNaN(row.urllcMeanLatencyUs)) slot.lat.push(row.urllcMeanLatencyUs);
  }
  return order.map((key) => {
    const slot = acc.get(key)!;
    const thr = slot.thr.reduce((a, b) => a + b, 0) / slot.thr.length / 1e6;
    const lat =
      slot.lat.length > 0
        ? slot.lat.reduce((a, b) => a + b, 0) / slot.lat.length / 1000
        : NaN;
    return { label: key, throughputMbps: thr, latencyMs: lat };
  });
}

/** Horizontal bars per scheduling scheme: eMBB throughput and URLLC latency. */
export function renderSchedBars(rows: SystemRow[]): string {
  const groups = groupSystemRows(rows);
  const doc = new SvgDoc(WIDTH, HEIGHT);
  doc.rect(0, 0, WIDTH, HEIGHT, { fill: "white" });
  const left = 190;
  const maxThr = Math.max(...groups.map((g) => g.throughputMbps)) * 1.15 || 1;
  const maxLat = Math.max(...groups.map((g) => (Number.isNaN(g.latencyMs) ? 0 : g.latencyMs))) * 1.3 || 1;
  const xThr = linearScale([0, maxThr], [left, WIDTH - MARGIN.right]);
  const xLat = linearScale([0, maxLat], [left, WIDTH - MARGIN.right]);
  const rowH = (HEIGHT - MARGIN.top - MARGIN.bottom) / groups.length;

  groups.forEach((g, i) => {
    const yTop = MARGIN.top + i * rowH;
    doc.text(10, yTop + rowH / 2, g.label);
    const thrW = xThr(g.throughputMbps) - left;
    doc.rect(left, yTop + 6, thrW, rowH * 0.35, {
      fill: "#2980b9",
      "data-series": `${g.label}:throughput_mbps`,
      "data-values": serializeValues([g.throughputMbps]),
    });
    doc.text(left + thrW + 4, yTop + 6 + rowH * 0.25, g.throughputMbps.toFixed(1));
    if (!Number.isNaN(g.latencyMs)) {
      const latW = xLat(g.latencyMs) - left;
      doc.rect(left, yTop + 10 + rowH * 0.35, latW, rowH * 0.35, {
        fill: "#333333",
        "data-series": `${g.label}:latency_ms`,
        "data-values": serializeValues([g.latencyMs]),
      });
      doc.text(left + latW + 4, yTop + rowH * 0.35 + 10 + rowH * 0.25, g.latencyMs.toFixed(2));
    }
  });
  doc.text(left, HEIGHT - 10, "eMBB throughput (Mbps, blue) / URLLC latency (ms, black)");
  return doc.render();
}

/** Vertical bars per coexistence policy with value labels. */
export function renderCoexistBars(rows: SystemRow[]): string {
  const groups = groupSystemRows(rows);
  const doc = new SvgDoc(WIDTH, HEIGHT);
  doc.rect(0, 0, WIDTH, HEIGHT, { fill: "white" });
  const maxThr = Math.max(...groups.map((g) => g.throughputMbps)) * 1.2 || 1;
  const y = linearScale([0, maxThr], [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const slotW = (WIDTH - MARGIN.left - MARGIN.right) / groups.length;

  for (const tick of y.ticks()) {
    doc.line(MARGIN.left, y(tick), WIDTH - MARGIN.right, y(tick), {
      stroke: "#dddddd",
      "stroke-width": 1,
    });
    doc.text(10, y(tick) + 4, tick.toFixed(0));
  }
  groups.forEach((g, i) => {
    const cx = MARGIN.left + slotW * (i + 0.5);
    const barW = slotW * 0.5;
    const top = y(g.throughputMbps);
    doc.rect(cx - barW / 2, top, barW, HEIGHT - MARGIN.bottom - top, {
      fill: "#2980b9",
      "data-series": `${g.label}:throughput_mbps`,
      "data-values": serializeValues([g.throughputMbps]),
    });
    doc.text(cx - 14, top - 6, g.throughputMbps.toFixed(1));
    doc.text(cx - slotW * 0.4, HEIGHT - MARGIN.bottom + 16, g.label.replace("instant/", ""));
  });
  doc.text(10, 16, "eMBB throughput (Mbps)");
  return doc.render();
}
