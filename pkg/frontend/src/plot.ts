/**
 * Gap-versus-evaluations figures from convergence traces.
 *
 * One curve per trace, x = gradient evaluations, y = objective gap on a
 * log scale by default.  Gaps at or below zero are clamped to 1e-16 so a
 * method that hits the exact optimum still plots.  Every input row maps
 * to exactly one marker; extrapolation events get a highlighted marker.
 * Rendering is pure: identical inputs yield identical bytes.
 */

import type { TraceRow } from "./trace.js";

export const GAP_FLOOR = 1e-16;

export interface Curve {
  label: string;
  rows: TraceRow[];
}

export interface PlotOptions {
  title?: string;
  logScale?: boolean; // default true
  width?: number;
  height?: number;
}

export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const MARGIN = { top: 48, right: 24, bottom: 52, left: 76 };

export interface PlotPoint {
  x: number; // pixel
  y: number; // pixel
  extrapolation: boolean;
  fallback: boolean;
}

export interface CurveGeometry {
  label: string;
  color: string;
  points: PlotPoint[];
}

export interface Geometry {
  width: number;
  height: number;
  plot: { x0: number; y0: number; x1: number; y1: number };
  curves: CurveGeometry[];
  xTicks: { pixel: number; label: string }[];
  yTicks: { pixel: number; label: string }[];
  title: string;
  logScale: boolean;
}

function clampGap(gap: number): number {
  return gap > GAP_FLOOR ? gap : GAP_FLOOR;
}

function niceStep(span: number, targetTicks: number): number {
  const raw = span / targetTicks;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= raw) return mult * power;
  }
  return 10 * power;
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-3) return value.toExponential(0).replace("+", "");
  return String(Number(value.toPrecision(6)));
}

export function computeGeometry(curves: Curve[], options: PlotOptions = {}): Geometry {
  if (curves.length === 0) {
    throw new Error("at least one curve is required");
  }
  const width = options.width ?? 860;
  const height = options.height ?? 520;
  const logScale = options.logScale ?? true;
  const plot = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    x1: width - MARGIN.right,
    y1: height - MARGIN.bottom,
  };

  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const curve of curves) {
    for (const row of curve.rows) {
      const gap = logScale ? clampGap(row.fGap) : row.fGap;
      xMin = Math.min(xMin, row.gradEvals);
      xMax = Math.max(xMax, row.gradEvals);
      yMin = Math.min(yMin, gap);
      yMax = Math.max(yMax, gap);
    }
  }
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }

  let yToPixel: (gap: number) => number;
  const yTicks: { pixel: number; label: string }[] = [];
  if (logScale) {
    let lo = Math.floor(Math.log10(yMin));
    let hi = Math.ceil(Math.log10(yMax));
    if (lo === hi) {
      lo -= 1;
      hi += 1;
    }
    const scale = (plot.y1 - plot.y0) / (hi - lo);
    yToPixel = (gap) => plot.y1 - (Math.log10(clampGap(gap)) - lo) * scale;
    const stride = Math.max(1, Math.ceil((hi - lo) / 8));
    for (let d = lo; d <= hi; d += stride) {
      yTicks.push({ pixel: plot.y1 - (d - lo) * scale, label: `1e${d}` });
    }
  } else {
    if (yMin === yMax) {
      yMin -= 1;
      yMax += 1;
    }
    const scale = (plot.y1 - plot.y0) / (yMax - yMin);
    yToPixel = (gap) => plot.y1 - (gap - yMin) * scale;
    const step = niceStep(yMax - yMin, 5);
    for (let v = Math.ceil(yMin / step) * step; v <= yMax; v += step) {
      yTicks.push({ pixel: yToPixel(v), label: formatTick(v) });
    }
  }

  const xScale = (plot.x1 - plot.x0) / (xMax - xMin);
  const xToPixel = (evals: number) => plot.x0 + (evals - xMin) * xScale;
  const xTicks: { pixel: number; label: string }[] = [];
  const step = niceStep(xMax - xMin, 6);
  for (let v = Math.ceil(xMin / step) * step; v <= xMax; v += step) {
    xTicks.push({ pixel: xToPixel(v), label: formatTick(v) });
  }

  const curveGeometry = curves.map((curve, i) => ({
    label: curve.label,
    color: PALETTE[i % PALETTE.length],
    points: curve.rows.map((row) => ({
      x: xToPixel(row.gradEvals),
      y: yToPixel(row.fGap),
      extrapolation: row.event === "extrapolation",
      fallback: row.fallback,
    })),
  }));

  return {
    width,
    height,
    plot,
    curves: curveGeometry,
    xTicks,
    yTicks,
    title: options.title ?? "",
    logScale,
  };
}

const XML_ESCAPES: Record<string, string> = {
  "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&apos;",
};

function escapeXml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => XML_ESCAPES[ch]);
}

function px(value: number): string {
  return value.toFixed(2);
}

export function renderSvg(curves: Curve[], options: PlotOptions = {}): string {
  const g = computeGeometry(curves, options);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${g.width}" height="${g.height}" ` +
    `viewBox="0 0 ${g.width} ${g.height}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${g.width}" height="${g.height}" fill="#ffffff"/>`);

  for (const tick of g.yTicks) {
    parts.push(
      `<line x1="${px(g.plot.x0)}" y1="${px(tick.pixel)}" x2="${px(g.plot.x1)}" ` +
      `y2="${px(tick.pixel)}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${px(g.plot.x0 - 8)}" y="${px(tick.pixel + 4)}" text-anchor="end" ` +
      `font-size="12" fill="#444444">${escapeXml(tick.label)}</text>`,
    );
  }
  for (const tick of g.xTicks) {
    parts.push(
      `<line x1="${px(tick.pixel)}" y1="${px(g.plot.y0)}" x2="${px(tick.pixel)}" ` +
      `y2="${px(g.plot.y1)}" stroke="#eeeeee"/>`,
    );
    parts.push(
      `<text x="${px(tick.pixel)}" y="${px(g.plot.y1 + 18)}" text-anchor="middle" ` +
      `font-size="12" fill="#444444">${escapeXml(tick.label)}</text>`,
    );
  }
  parts.push(
    `<rect x="${px(g.plot.x0)}" y="${px(g.plot.y0)}" width="${px(g.plot.x1 - g.plot.x0)}" ` +
    `height="${px(g.plot.y1 - g.plot.y0)}" fill="none" stroke="#333333"/>`,
  );

  if (g.title) {
    parts.push(
      `<text class="title" x="${px(g.width / 2)}" y="26" text-anchor="middle" ` +
      `font-size="16" fill="#111111">${escapeXml(g.title)}</text>`,
    );
  }
  parts.push(
    `<text x="${px((g.plot.x0 + g.plot.x1) / 2)}" y="${px(g.height - 12)}" ` +
    `text-anchor="middle" font-size="13" fill="#222222">gradient evaluations</text>`,
  );
  parts.push(
    `<text x="20" y="${px((g.plot.y0 + g.plot.y1) / 2)}" text-anchor="middle" ` +
    `font-size="13" fill="#222222" transform="rotate(-90 20 ${px((g.plot.y0 + g.plot.y1) / 2)})">` +
    `objective gap${g.logScale ? " (log scale)" : ""}</text>`,
  );

  for (const curve of g.curves) {
    const coords = curve.points.map((p) => `${px(p.x)},${px(p.y)}`).join(" ");
    parts.push(`<g class="curve" data-label="${escapeXml(curve.label)}">`);
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${curve.color}" stroke-width="1.5"/>`,
    );
    for (const point of curve.points) {
      if (point.extrapolation) {
        parts.push(
          `<circle class="pt extrapolation" cx="${px(point.x)}" cy="${px(point.y)}" r="3" ` +
          `fill="#ffffff" stroke="${curve.color}" stroke-width="1.5"/>`,
        );
      } else {
        parts.push(
          `<circle class="pt" cx="${px(point.x)}" cy="${px(point.y)}" r="1.5" ` +
          `fill="${curve.color}"/>`,
        );
      }
    }
    parts.push("</g>");
  }

  parts.push(`<g class="legend">`);
  g.curves.forEach((curve, i) => {
    const y = g.plot.y0 + 10 + i * 18;
    const x = g.plot.x1 - 150;
    parts.push(`<rect x="${px(x)}" y="${px(y - 8)}" width="14" height="10" fill="${curve.color}"/>`);
    parts.push(
      `<text class="legend-label" x="${px(x + 20)}" y="${px(y + 1)}" font-size="12" ` +
      `fill="#111111">${escapeXml(curve.label)}</text>`,
    );
  });
  parts.push("</g>");

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
