/**
 * Two-series line chart from rolling-average CSVs (columns
 * window_start_block, mean_median_ms). Undefined windows (empty mean) break
 * the line into segments instead of interpolating across the gap.
 */

import { numeric, numericOrNull, requireColumns, SchemaError, Table } from "./csv.js";
import {
  drawAxes, drawLegend, finish, fmt, LinearScale, newFrame, PALETTE, ticks,
} from "./svg.js";

export interface RollingLineOptions {
  title?: string;
  width?: number;
  height?: number;
}

interface Point {
  x: number;
  y: number | null;
}

function points(table: Table): Point[] {
  requireColumns(table, ["window_start_block", "mean_median_ms"]);
  if (table.rows.length === 0) {
    throw new SchemaError(`${table.path}: empty series`);
  }
  return table.rows.map((_, i) => ({
    x: numeric(table, i, "window_start_block"),
    y: numericOrNull(table, i, "mean_median_ms"),
  }));
}

function polylines(series: Point[], color: string): string {
  const segments: string[][] = [[]];
  for (const point of series) {
    if (point.y === null) {
      segments.push([]);
    } else {
      segments[segments.length - 1].push(`${fmt(point.x)},${fmt(point.y)}`);
    }
  }
  return segments
    .filter((s) => s.length > 0)
    .map((s) => s.length === 1
      ? `<circle cx="${s[0].split(",")[0]}" cy="${s[0].split(",")[1]}" r="3" fill="${color}"/>`
      : `<polyline points="${s.join(" ")}" fill="none" stroke="${color}" stroke-width="2"/>`)
    .join("");
}

export function rollingLine(a: Table, b: Table, labelA: string, labelB: string,
                            options: RollingLineOptions = {}): string {
  const seriesA = points(a);
  const seriesB = points(b);
  if (seriesA.length !== seriesB.length) {
    throw new SchemaError(
      `window count mismatch: ${a.path} has ${seriesA.length}, ` +
      `${b.path} has ${seriesB.length}`);
  }
  const xs = [...seriesA, ...seriesB].map((p) => p.x);
  const ys = [...seriesA, ...seriesB]
    .map((p) => p.y)
    .filter((y): y is number => y !== null);
  if (ys.length === 0) {
    throw new SchemaError(`${a.path}, ${b.path}: every window is undefined`);
  }
  const frame = newFrame(options.width ?? 640, options.height ?? 400,
                         options.title ?? "");
  const x = new LinearScale(Math.min(...xs), Math.max(...xs), 0, frame.plotWidth);
  const lo = Math.min(...ys);
  const hi = Math.max(...ys);
  const pad = (hi - lo || hi || 1) * 0.08;
  const y = new LinearScale(Math.max(0, lo - pad), hi + pad, frame.plotHeight, 0);

  drawAxes(frame,
           x, ticks(Math.min(...xs), Math.max(...xs)), "window start (block #)",
           y, ticks(Math.max(0, lo - pad), hi + pad), "mean of per-block median (ms)");
  const project = (s: Point[]) =>
    s.map((p) => ({ x: x.at(p.x), y: p.y === null ? null : y.at(p.y) }));
  frame.parts.push(polylines(project(seriesA), PALETTE[0]));
  frame.parts.push(polylines(project(seriesB), PALETTE[1]));
  drawLegend(frame, [[labelA, PALETTE[0]], [labelB, PALETTE[1]]]);
  return finish(frame);
}
