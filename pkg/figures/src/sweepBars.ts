/**
 * Grouped bar chart from a sweep grid CSV (columns P, K, seed,
 * mean_median_ms): x axis is P, one bar series per K, bar height is the
 * across-seed mean. Rows with an empty mean (undefined medians) are skipped.
 */

import { numeric, numericOrNull, requireColumns, SchemaError, Table } from "./csv.js";
import {
  drawAxes, drawLegend, finish, fmt, LinearScale, newFrame, PALETTE, ticks,
} from "./svg.js";

export interface SweepBarsOptions {
  title?: string;
  width?: number;
  height?: number;
}

export function sweepBars(grid: Table, options: SweepBarsOptions = {}): string {
  requireColumns(grid, ["P", "K", "seed", "mean_median_ms"]);
  const cells = new Map<string, { p: number; k: number; values: number[] }>();
  for (let i = 0; i < grid.rows.length; i++) {
    const p = numeric(grid, i, "P");
    const k = numeric(grid, i, "K");
    const mean = numericOrNull(grid, i, "mean_median_ms");
    if (mean === null) {
      continue;
    }
    const key = `${p}|${k}`;
    const cell = cells.get(key) ?? { p, k, values: [] };
    cell.values.push(mean);
    cells.set(key, cell);
  }
  if (cells.size === 0) {
    throw new SchemaError(`${grid.path}: no usable rows (every mean is empty)`);
  }

  const pValues = [...new Set([...cells.values()].map((c) => c.p))].sort((a, b) => a - b);
  const kValues = [...new Set([...cells.values()].map((c) => c.k))].sort((a, b) => a - b);
  const height = (p: number, k: number): number | null => {
    const cell = cells.get(`${p}|${k}`);
    if (!cell) {
      return null;
    }
    return cell.values.reduce((a, b) => a + b, 0) / cell.values.length;
  };

  const yMax = Math.max(...[...cells.values()].map(
    (c) => c.values.reduce((a, b) => a + b, 0) / c.values.length));
  const frame = newFrame(options.width ?? 640, options.height ?? 400,
                         options.title ?? "");
  const y = new LinearScale(0, yMax * 1.05, frame.plotHeight, 0);
  const groupWidth = frame.plotWidth / pValues.length;
  const barWidth = (groupWidth * 0.7) / kValues.length;

  // bars first, then the frame so gridlines overlay nothing important
  const bars: string[] = [];
  pValues.forEach((p, gi) => {
    kValues.forEach((k, si) => {
      const value = height(p, k);
      if (value === null) {
        return;
      }
      const x0 = gi * groupWidth + groupWidth * 0.15 + si * barWidth;
      const py = y.at(value);
      bars.push(
        `<rect class="bar" x="${fmt(x0)}" y="${fmt(py)}" width="${fmt(barWidth)}" ` +
        `height="${fmt(frame.plotHeight - py)}" fill="${PALETTE[si % PALETTE.length]}">` +
        `<title>P=${p} K=${k}: ${fmt(value)} ms</title></rect>`);
    });
  });

  const xCenters = new LinearScale(0, pValues.length - 1,
                                   groupWidth / 2,
                                   frame.plotWidth - groupWidth / 2);
  drawAxes(frame,
           xCenters, pValues.map((_, i) => i), "P",
           y, ticks(0, yMax * 1.05), "mean of per-block median (ms)",
           (i) => String(pValues[i]));
  frame.parts.push(...bars);
  if (kValues.length > 1) {
    drawLegend(frame, kValues.map(
      (k, i) => [`K=${k}`, PALETTE[i % PALETTE.length]]));
  }
  return finish(frame);
}
