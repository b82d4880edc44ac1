/** Minimal dependency-free SVG line charts, one per item. A polyline is
 * broken wherever a value is null or the time gap exceeds the expected
 * spacing, so missing data reads as a gap rather than an interpolation. */

import type { Series } from "./series.js";

export interface ChartOptions {
  width?: number;
  height?: number;
  /** Expected spacing between samples in ms; larger gaps break the line. */
  maxGapMs: number;
}

const PAD = { left: 56, right: 12, top: 10, bottom: 24 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

export function chartSvg(series: Series, opts: ChartOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 140;
  const innerW = width - PAD.left - PAD.right;
  const innerH = height - PAD.top - PAD.bottom;
  const present = series.points.filter((p) => p.y !== null);
  const title = `${series.label} (${series.unit})`;

  if (present.length === 0) {
    return (
      `<svg role="img" viewBox="0 0 ${width} ${height}" data-item="${esc(series.item)}">` +
      `<text x="${PAD.left}" y="${height / 2}" class="chart-empty">` +
      `${esc(title)}: no data in range</text></svg>`
    );
  }

  const ts = present.map((p) => p.t);
  const ys = present.map((p) => p.y as number);
  const tMin = Math.min(...ts);
  const tMax = Math.max(...ts);
  let yMin = Math.min(...ys);
  let yMax = Math.max(...ys);
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  const sx = (t: number) =>
    tMax === tMin ? PAD.left + innerW / 2 : PAD.left + ((t - tMin) / (tMax - tMin)) * innerW;
  const sy = (y: number) => PAD.top + (1 - (y - yMin) / (yMax - yMin)) * innerH;

  // Split into segments at nulls and at oversized time gaps.
  const segments: { t: number; y: number }[][] = [];
  let current: { t: number; y: number }[] = [];
  let prevT: number | null = null;
  for (const p of series.points) {
    if (p.y === null) {
      if (current.length) segments.push(current);
      current = [];
      prevT = null;
      continue;
    }
    if (prevT !== null && p.t - prevT > opts.maxGapMs) {
      if (current.length) segments.push(current);
      current = [];
    }
    current.push({ t: p.t, y: p.y });
    prevT = p.t;
  }
  if (current.length) segments.push(current);

  const paths = segments
    .filter((seg) => seg.length > 1)
    .map((seg) => {
      const d = seg
        .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.t).toFixed(1)},${sy(p.y).toFixed(1)}`)
        .join("");
      return `<path class="chart-line" data-seg="1" d="${d}"/>`;
    })
    .join("");
  const dots = present
    .map(
      (p) =>
        `<circle class="chart-dot" data-x="${esc(p.x)}" data-y="${p.y}" ` +
        `cx="${sx(p.t).toFixed(1)}" cy="${sy(p.y as number).toFixed(1)}" r="2"/>`,
    )
    .join("");

  return (
    `<svg role="img" viewBox="0 0 ${width} ${height}" data-item="${esc(series.item)}">` +
    `<text class="chart-title" x="${PAD.left}" y="${PAD.top + 2}">${esc(title)}</text>` +
    `<text class="chart-ymax" x="4" y="${PAD.top + 10}">${yMax}</text>` +
    `<text class="chart-ymin" x="4" y="${PAD.top + innerH}">${yMin}</text>` +
    `<line class="chart-axis" x1="${PAD.left}" y1="${PAD.top + innerH}" ` +
    `x2="${width - PAD.right}" y2="${PAD.top + innerH}"/>` +
    paths +
    dots +
    `</svg>`
  );
}
