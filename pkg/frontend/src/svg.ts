/**
 * Minimal deterministic SVG scene building: fixed-precision coordinates,
 * no timestamps or generated ids, so identical inputs yield identical bytes.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+($|e)/, "$1") : s;
}

export interface Scale {
  toPx(v: number): number;
  ticks: number[];
  label(v: number): string;
}

export function linearScale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  if (hi - lo < 1e-300) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step = niceStep(span / 4);
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) ticks.push(v);
  return {
    toPx: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks,
    label: (v) => fmt(Math.abs(v) < 1e-12 * span ? 0 : v),
  };
}

export function logScale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = Math.max(lhi - llo, 1e-12);
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  return {
    toPx: (v) => pxLo + ((Math.log10(v) - llo) / span) * (pxHi - pxLo),
    ticks,
    label: (v) => {
      const e = Math.round(Math.log10(v));
      return Math.abs(Math.pow(10, e) - v) < 1e-9 * v ? `1e${e}` : fmt(v);
    },
  };
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(raw) || 1)));
  const r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2 * mag;
  if (r < 7.5) return 5 * mag;
  return 10 * mag;
}

export function polyline(
  points: Array<[number, number]>,
  color: string,
  width = 1.5,
  dash = "",
): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return (
    `<polyline fill="none" stroke="${color}" stroke-width="${width}"` +
    `${dashAttr} points="${pts}"/>`
  );
}

export function circleMarkers(
  points: Array<[number, number]>,
  color: string,
  r = 2.5,
): string {
  return points
    .map(([x, y]) => `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${color}"/>`)
    .join("");
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  color: string,
  width = 1,
  dash = "",
): string {
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return (
    `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}"` +
    ` stroke="${color}" stroke-width="${width}"${dashAttr}/>`
  );
}

export function text(
  x: number,
  y: number,
  content: string,
  opts: { size?: number; anchor?: string; color?: string } = {},
): string {
  const size = opts.size ?? 11;
  const anchor = opts.anchor ?? "start";
  const color = opts.color ?? "#222";
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}"` +
    ` font-family="sans-serif" text-anchor="${anchor}" fill="${color}">` +
    `${escapeXml(content)}</text>`
  );
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body +
    `</svg>\n`
  );
}

export interface Frame {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Axis frame with tick labels; y grows downward in SVG, so yScale callers
 * should map data-high to y0 (top). */
export function axes(
  frame: Frame,
  xs: Scale,
  ys: Scale,
  title: string,
): string {
  let out = "";
  out += `<rect x="${fmt(frame.x0)}" y="${fmt(frame.y0)}" width="${fmt(
    frame.x1 - frame.x0,
  )}" height="${fmt(frame.y1 - frame.y0)}" fill="none" stroke="#999"/>`;
  for (const t of xs.ticks) {
    const px = xs.toPx(t);
    out += line(px, frame.y1, px, frame.y1 + 4, "#555");
    out += text(px, frame.y1 + 15, xs.label(t), { anchor: "middle", size: 10 });
  }
  for (const t of ys.ticks) {
    const py = ys.toPx(t);
    out += line(frame.x0 - 4, py, frame.x0, py, "#555");
    out += text(frame.x0 - 6, py + 3, ys.label(t), { anchor: "end", size: 10 });
    out += line(frame.x0, py, frame.x1, py, "#eee");
  }
  out += text(frame.x0, frame.y0 - 6, title, { size: 12 });
  return out;
}
