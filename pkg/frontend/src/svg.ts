/**
 * Minimal static SVG line charts: axes, ticks, one polyline per series,
 * legend.  No interactivity and no third-party plotting dependency; the
 * output is a plain standalone .svg document.
 */

import { FigureModel, Series } from "./figures.js";

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const BOUND_DASH = "6 3";

interface Extent {
  min: number;
  max: number;
}

function extent(values: number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  return { min, max };
}

function ticks(ext: Extent, count: number): number[] {
  const span = ext.max - ext.min;
  const rawStep = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? candidates[candidates.length - 1];
  const start = Math.ceil(ext.min / step) * step;
  const out: number[] = [];
  for (let t = start; t <= ext.max + 1e-9; t += step) {
    out.push(Number(t.toFixed(10)));
  }
  return out;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(model: FigureModel, width = 860, height = 560): string {
  const margin = { left: 64, right: 240, top: 44, bottom: 52 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const xs = model.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = model.series.flatMap((s) => s.points.map((p) => p.y));
  const xExt = extent(xs);
  const yExt = extent([0, ...ys]);

  const sx = (x: number) => margin.left + ((x - xExt.min) / (xExt.max - xExt.min)) * plotW;
  const sy = (y: number) => margin.top + plotH - ((y - yExt.min) / (yExt.max - yExt.min)) * plotH;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${margin.left + plotW / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15" font-weight="bold">${esc(model.title)}</text>`);

  // frame
  parts.push(`<rect x="${margin.left}" y="${margin.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`);

  for (const t of ticks(xExt, 9)) {
    const x = sx(t);
    parts.push(`<line x1="${x}" y1="${margin.top + plotH}" x2="${x}" y2="${margin.top + plotH + 5}" stroke="#333"/>`);
    parts.push(`<line x1="${x}" y1="${margin.top}" x2="${x}" y2="${margin.top + plotH}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${x}" y="${margin.top + plotH + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${t}</text>`);
  }
  for (const t of ticks(yExt, 9)) {
    const y = sy(t);
    parts.push(`<line x1="${margin.left - 5}" y1="${y}" x2="${margin.left}" y2="${y}" stroke="#333"/>`);
    parts.push(`<line x1="${margin.left}" y1="${y}" x2="${margin.left + plotW}" y2="${y}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${margin.left - 8}" y="${y + 4}" text-anchor="end" font-family="sans-serif" font-size="11">${t}</text>`);
  }

  parts.push(`<text x="${margin.left + plotW / 2}" y="${height - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">${esc(model.xLabel)}</text>`);
  parts.push(`<text x="18" y="${margin.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${margin.top + plotH / 2})">${esc(model.yLabel)}</text>`);

  model.series.forEach((series: Series, i: number) => {
    const color = PALETTE[i % PALETTE.length];
    const path = series.points.map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`).join(" ");
    const dash = series.isBound ? ` stroke-dasharray="${BOUND_DASH}"` : "";
    parts.push(`<polyline points="${path}" fill="none" stroke="${color}" stroke-width="2"${dash} data-series="${esc(series.label)}"/>`);
    for (const p of series.points) {
      parts.push(`<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="2.4" fill="${color}"/>`);
    }
    const ly = margin.top + 14 + i * 20;
    const lx = margin.left + plotW + 14;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${lx + 32}" y="${ly}" font-family="sans-serif" font-size="12">${esc(series.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}
