/**
 * Norm/minima/equivalence time series from one run history.
 *
 * Three stacked panels over a shared time axis: the monitored Sobolev norm,
 * the two pointwise minima against the delta0 floor and zero lines, and the
 * equivalence ratios. An aborted run gets a vertical marker at the abort
 * event.
 */

import { HistoryRow } from "./csv.js";
import {
  Frame,
  axes,
  circleMarkers,
  document as svgDocument,
  line,
  linearScale,
  polyline,
  text,
} from "./svg.js";

export interface HistoryPlotOptions {
  delta0: number;
  width?: number;
}

const PANEL_H = 150;
const MARGIN = { left: 64, right: 16, top: 28, gap: 34, bottom: 34 };

function panelFrame(width: number, index: number): Frame {
  const y0 = MARGIN.top + index * (PANEL_H + MARGIN.gap);
  return { x0: MARGIN.left, y0, x1: width - MARGIN.right, y1: y0 + PANEL_H };
}

function seriesPoints(
  rows: HistoryRow[],
  key: keyof HistoryRow,
  xs: (t: number) => number,
  ys: (v: number) => number,
): Array<[number, number]> {
  return rows.map((r) => [xs(r.t), ys(r[key] as number)]);
}

function bounds(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.08 * (hi - lo);
  return [lo - pad, hi + pad];
}

export function buildHistorySvg(
  rows: HistoryRow[],
  opts: HistoryPlotOptions,
): string {
  if (rows.length === 0) {
    throw new Error("history has no monitor events");
  }
  const width = opts.width ?? 640;
  const height = MARGIN.top + 3 * PANEL_H + 2 * MARGIN.gap + MARGIN.bottom;
  const tLo = rows[0].t;
  const tHi = rows[rows.length - 1].t;
  let body = "";

  const abortRow = rows.find((r) => r.abort !== "");

  const panels: Array<{
    title: string;
    series: Array<{ key: keyof HistoryRow; color: string; label: string }>;
    guides: Array<{ value: number; color: string; label: string }>;
  }> = [
    {
      title: "weighted Sobolev norm",
      series: [{ key: "norm_h2l", color: "#1f77b4", label: "|| (u,theta,h) ||" }],
      guides: [],
    },
    {
      title: "pointwise minima vs the delta0 floor",
      series: [
        { key: "min_theta_total", color: "#d62728", label: "min theta_total" },
        { key: "min_h_total", color: "#2ca02c", label: "min h_total" },
      ],
      guides: [
        { value: opts.delta0, color: "#2ca02c", label: "delta0" },
        { value: 0.0, color: "#888", label: "0" },
      ],
    },
    {
      title: "norm-equivalence ratios",
      series: [
        { key: "equiv_ratio_lo", color: "#9467bd", label: "ratio (L2)" },
        { key: "equiv_ratio_hi", color: "#ff7f0e", label: "ratio (dy variant)" },
      ],
      guides: [{ value: 1.0, color: "#888", label: "1" }],
    },
  ];

  panels.forEach((panel, i) => {
    const frame = panelFrame(width, i);
    const xs = linearScale(tLo, tHi === tLo ? tLo + 1 : tHi, frame.x0, frame.x1);
    const values = panel.series.flatMap((s) =>
      rows.map((r) => r[s.key] as number),
    );
    for (const g of panel.guides) values.push(g.value);
    const [vLo, vHi] = bounds(values);
    const ys = linearScale(vLo, vHi, frame.y1, frame.y0);
    body += axes(frame, xs, ys, panel.title);
    for (const g of panel.guides) {
      const py = ys.toPx(g.value);
      body += line(frame.x0, py, frame.x1, py, g.color, 1, "4 3");
      body += text(frame.x1 - 4, py - 3, g.label, {
        anchor: "end",
        size: 9,
        color: g.color,
      });
    }
    panel.series.forEach((s, j) => {
      const pts = seriesPoints(rows, s.key, xs.toPx, ys.toPx);
      body += polyline(pts, s.color);
      body += circleMarkers(pts, s.color, 1.8);
      body += text(frame.x0 + 6 + 150 * j, frame.y0 + 13, s.label, {
        size: 10,
        color: s.color,
      });
    });
    if (abortRow) {
      const px = xs.toPx(abortRow.t);
      body += line(px, frame.y0, px, frame.y1, "#c00", 1.5, "2 2");
      if (i === 0) {
        body += text(px, frame.y0 - 6, `abort: ${abortRow.abort}`, {
          anchor: "middle",
          size: 10,
          color: "#c00",
        });
      }
    }
  });

  body += text(width / 2, height - 10, "t", { anchor: "middle", size: 12 });
  return svgDocument(width, height, body);
}
