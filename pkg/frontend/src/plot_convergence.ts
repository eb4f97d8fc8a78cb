/**
 * Log-log error-vs-parameter plot from a refinement study CSV, one series
 * per study axis, each annotated with its least-squares slope.
 */

import { StudyRow } from "./csv.js";
import {
  Frame,
  axes,
  circleMarkers,
  document as svgDocument,
  fmt,
  logScale,
  polyline,
  text,
} from "./svg.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

export function fitSlope(rows: StudyRow[]): number {
  // least squares on (ln parameter, ln error)
  const xs = rows.map((r) => Math.log(r.parameter));
  const ys = rows.map((r) => Math.log(r.error));
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  return num / den;
}

export function buildConvergenceSvg(rows: StudyRow[]): string {
  if (rows.length < 2) {
    throw new Error("need at least 2 study rows to plot convergence");
  }
  const byAxis = new Map<string, StudyRow[]>();
  for (const row of rows) {
    if (row.error <= 0 || row.parameter <= 0) {
      throw new Error("log-log plot needs positive parameters and errors");
    }
    const list = byAxis.get(row.axis) ?? [];
    list.push(row);
    byAxis.set(row.axis, list);
  }
  for (const [axis, list] of byAxis) {
    if (list.length < 2) {
      throw new Error(`axis '${axis}' has a single row; cannot fit a slope`);
    }
  }

  const width = 560;
  const height = 420;
  const frame: Frame = { x0: 70, y0: 30, x1: width - 20, y1: height - 50 };
  const params = rows.map((r) => r.parameter);
  const errors = rows.map((r) => r.error);
  const xs = logScale(Math.min(...params) / 1.2, Math.max(...params) * 1.2, frame.x0, frame.x1);
  const ys = logScale(Math.min(...errors) / 1.5, Math.max(...errors) * 1.5, frame.y1, frame.y0);

  let body = axes(frame, xs, ys, "refinement error (log-log)");
  let i = 0;
  for (const [axis, list] of byAxis) {
    const color = COLORS[i % COLORS.length];
    const sorted = [...list].sort((a, b) => a.parameter - b.parameter);
    const pts: Array<[number, number]> = sorted.map((r) => [
      xs.toPx(r.parameter),
      ys.toPx(r.error),
    ]);
    body += polyline(pts, color);
    body += circleMarkers(pts, color);
    const slope = fitSlope(sorted);
    body += text(
      frame.x0 + 8,
      frame.y0 + 16 + 14 * i,
      `${axis}: slope = ${fmt(Math.round(slope * 100) / 100)}`,
      { size: 11, color },
    );
    i += 1;
  }
  body += text(width / 2, height - 12, "parameter", {
    anchor: "middle",
    size: 12,
  });
  return svgDocument(width, height, body);
}
