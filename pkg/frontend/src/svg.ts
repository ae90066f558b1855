/**
 * Minimal deterministic SVG line/scatter chart renderer.
 *
 * Output is a pure function of the chart description: fixed palette,
 * fixed number formatting, no timestamps or generated ids, so repeated
 * renders are byte-identical.
 */

export type ScaleKind = "linear" | "log";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  /** draw straight segments between points (default true) */
  line?: boolean;
  /** draw circle markers at the points (default false) */
  points?: boolean;
  /** dashed stroke, e.g. for fitted trend lines */
  dashed?: boolean;
}

export interface Chart {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: ScaleKind;
  yScale: ScaleKind;
  series: Series[];
  /** extra caption lines drawn under the legend */
  annotations?: string[];
}

export class EmptyChartError extends Error {}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 72, right: 168, top: 40, bottom: 52 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/** Fixed-precision coordinate/label formatting keeps output stable. */
const fmt = (v: number): string => {
  const s = v.toPrecision(6);
  return s.includes(".") && !s.includes("e")
    ? s.replace(/\.?0+$/, "") : s;
};

const fmtTick = (v: number, scale: ScaleKind): string =>
  scale === "log" ? `1e${Math.round(Math.log10(v))}` : fmt(v);

interface Mapper {
  (v: number): number;
}

function makeScale(kind: ScaleKind, lo: number, hi: number,
                   rangeLo: number, rangeHi: number): Mapper {
  const f = kind === "log" ? Math.log10 : (v: number) => v;
  const [a, b] = [f(lo), f(hi)];
  const span = b - a || 1;
  return (v) => rangeLo + ((f(v) - a) / span) * (rangeHi - rangeLo);
}

function ticks(kind: ScaleKind, lo: number, hi: number): number[] {
  if (kind === "log") {
    const out: number[] = [];
    const [e0, e1] = [Math.ceil(Math.log10(lo) - 1e-9),
                      Math.floor(Math.log10(hi) + 1e-9)];
    const step = Math.max(1, Math.ceil((e1 - e0) / 8));
    for (let e = e0; e <= e1; e += step) out.push(10 ** e);
    return out;
  }
  const span = hi - lo || 1;
  const raw = span / 6;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag)
    .find((s) => span / s <= 6) ?? 10 * mag;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * span;
       v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function finitePairs(s: Series, logX: boolean,
                     logY: boolean): [number, number][] {
  const out: [number, number][] = [];
  for (let i = 0; i < s.x.length; i++) {
    const [x, y] = [s.x[i], s.y[i]];
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
    if ((logX && x <= 0) || (logY && y <= 0)) continue;
    out.push([x, y]);
  }
  return out;
}

export function renderChart(chart: Chart): string {
  const logX = chart.xScale === "log";
  const logY = chart.yScale === "log";
  const cleaned = chart.series.map((s) => ({
    series: s, pairs: finitePairs(s, logX, logY),
  }));
  const pairs = cleaned.flatMap((c) => c.pairs);
  if (pairs.length === 0) {
    throw new EmptyChartError(`no plottable samples for '${chart.title}'`);
  }
  const xs = pairs.map((p) => p[0]);
  const ys = pairs.map((p) => p[1]);
  let [xLo, xHi] = [Math.min(...xs), Math.max(...xs)];
  let [yLo, yHi] = [Math.min(...ys), Math.max(...ys)];
  if (xLo === xHi) [xLo, xHi] = [xLo - 1, xHi + 1];
  if (yLo === yHi) [yLo, yHi] = logY
    ? [yLo / 10, yHi * 10] : [yLo - 1, yHi + 1];
  const px = makeScale(chart.xScale, xLo, xHi, MARGIN.left,
                       WIDTH - MARGIN.right);
  const py = makeScale(chart.yScale, yLo, yHi, HEIGHT - MARGIN.bottom,
                       MARGIN.top);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
    `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
    `font-family="Helvetica,Arial,sans-serif" font-size="12">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" ` +
    `font-size="15">${esc(chart.title)}</text>`);

  // axes, grid, tick labels
  const [x0, x1] = [MARGIN.left, WIDTH - MARGIN.right];
  const [y0, y1] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  for (const t of ticks(chart.xScale, xLo, xHi)) {
    const x = fmt(px(t));
    parts.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y1}" ` +
      `stroke="#dddddd"/>`);
    parts.push(`<text x="${x}" y="${y0 + 16}" text-anchor="middle">` +
      `${fmtTick(t, chart.xScale)}</text>`);
  }
  for (const t of ticks(chart.yScale, yLo, yHi)) {
    const y = fmt(py(t));
    parts.push(`<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" ` +
      `stroke="#dddddd"/>`);
    parts.push(`<text x="${x0 - 6}" y="${y}" text-anchor="end" ` +
      `dominant-baseline="middle">${fmtTick(t, chart.yScale)}</text>`);
  }
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" ` +
    `height="${y0 - y1}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" ` +
    `text-anchor="middle">${esc(chart.xLabel)}</text>`);
  parts.push(`<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 18 ${(y0 + y1) / 2})">` +
    `${esc(chart.yLabel)}</text>`);

  // series
  cleaned.forEach(({ series, pairs: pts }, i) => {
    const color = PALETTE[i % PALETTE.length];
    if (series.line !== false && pts.length > 1) {
      const d = pts.map(([x, y], j) =>
        `${j === 0 ? "M" : "L"}${fmt(px(x))} ${fmt(py(y))}`).join("");
      const dash = series.dashed ? ` stroke-dasharray="6 4"` : "";
      parts.push(`<path class="series" d="${d}" fill="none" ` +
        `stroke="${color}" stroke-width="1.5"${dash}/>`);
    }
    if (series.points) {
      for (const [x, y] of pts) {
        parts.push(`<circle class="series-point" cx="${fmt(px(x))}" ` +
          `cy="${fmt(py(y))}" r="3.5" fill="${color}"/>`);
      }
    }
  });

  // legend + annotations
  let ly = MARGIN.top + 8;
  const lx = WIDTH - MARGIN.right + 12;
  cleaned.forEach(({ series }, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 18}" ` +
      `y2="${ly - 4}" stroke="${color}" stroke-width="3"/>`);
    parts.push(`<text class="legend" x="${lx + 24}" y="${ly}">` +
      `${esc(series.label)}</text>`);
    ly += 18;
  });
  for (const note of chart.annotations ?? []) {
    ly += 6;
    parts.push(`<text class="annotation" x="${lx}" y="${ly}" ` +
      `font-style="italic">${esc(note)}</text>`);
    ly += 14;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
