/**
 * Overlaid translucent histograms from two histogram CSVs (columns
 * bin_start_ms, count; sparse, zero bins are absent). Bin width is inferred
 * per file as the GCD of start offsets; divisible estimates reconcile to the
 * finer one, anything else is a mismatch error. An optional [lo, hi) range
 * restricts the x axis (zoomed variants).
 */

import { numeric, requireColumns, SchemaError, Table } from "./csv.js";
import {
  drawAxes, drawLegend, finish, fmt, LinearScale, newFrame, PALETTE, ticks,
} from "./svg.js";

export interface HistogramOverlayOptions {
  title?: string;
  width?: number;
  height?: number;
  range?: { lo: number; hi: number };
}

export interface RenderedOverlay {
  svg: string;
  warnings: string[];
}

interface Bin {
  start: number;
  count: number;
}

function bins(table: Table): Bin[] {
  requireColumns(table, ["bin_start_ms", "count"]);
  const out = table.rows.map((_, i) => ({
    start: numeric(table, i, "bin_start_ms"),
    count: numeric(table, i, "count"),
  }));
  return out.sort((a, b) => a.start - b.start);
}

function gcd(a: number, b: number): number {
  while (b) {
    [a, b] = [b, a % b];
  }
  return a;
}

/** Bin width as GCD of start offsets; null when one bin can't pin it down. */
function inferWidth(table: Table, sorted: Bin[]): number | null {
  if (sorted.length < 2) {
    return null;
  }
  let width = 0;
  for (const bin of sorted) {
    const delta = bin.start - sorted[0].start;
    if (Math.abs(delta - Math.round(delta)) > 1e-6) {
      throw new SchemaError(
        `${table.path}: non-integral bin start ${bin.start}`);
    }
    width = gcd(width, Math.round(delta));
  }
  return width;
}

export function histogramOverlay(
    a: Table, b: Table, labelA: string, labelB: string,
    options: HistogramOverlayOptions = {}): RenderedOverlay {
  const warnings: string[] = [];
  let binsA = bins(a);
  let binsB = bins(b);
  const widthA = inferWidth(a, binsA);
  const widthB = inferWidth(b, binsB);
  let width = widthA ?? widthB;
  if (widthA !== null && widthB !== null && widthA !== widthB) {
    // The GCD over sparse bins can only overestimate the true width, so two
    // same-width files may infer different multiples of it. Divisible
    // estimates are reconciled to the finer one; anything else is a real
    // disagreement between the inputs.
    const fine = Math.min(widthA, widthB);
    const coarse = Math.max(widthA, widthB);
    if (fine === 0 || coarse % fine !== 0) {
      throw new SchemaError(
        `bin width mismatch: ${a.path} uses ${widthA} ms, ${b.path} uses ${widthB} ms`);
    }
    width = fine;
  }
  if (width === null || width === 0) {
    throw new SchemaError(
      "cannot infer bin width: need at least two distinct bins in one input");
  }

  if (options.range) {
    const { lo, hi } = options.range;
    const keep = (bin: Bin) => bin.start >= lo && bin.start < hi;
    binsA = binsA.filter(keep);
    binsB = binsB.filter(keep);
  }
  for (const [table, list] of [[a, binsA], [b, binsB]] as const) {
    if (list.length === 0) {
      warnings.push(`${table.path}: no bins to draw` +
                    (options.range ? " in the requested range" : ""));
    }
  }
  const all = [...binsA, ...binsB];
  if (all.length === 0) {
    throw new SchemaError("nothing to draw: both histograms are empty");
  }

  const xLo = options.range?.lo ?? Math.min(...all.map((bin) => bin.start));
  const xHi = options.range?.hi ??
    Math.max(...all.map((bin) => bin.start)) + width;
  const yMax = Math.max(...all.map((bin) => bin.count));
  const frame = newFrame(options.width ?? 640, options.height ?? 400,
                         options.title ?? "");
  const x = new LinearScale(xLo, xHi, 0, frame.plotWidth);
  const y = new LinearScale(0, yMax * 1.05, frame.plotHeight, 0);

  drawAxes(frame,
           x, ticks(xLo, xHi), "block propagation time, per-block median (ms)",
           y, ticks(0, yMax * 1.05), "blocks");
  for (const [list, color] of [[binsA, PALETTE[0]], [binsB, PALETTE[1]]] as
       [Bin[], string][]) {
    for (const bin of list) {
      const x0 = x.at(bin.start);
      const x1 = x.at(bin.start + width);
      const py = y.at(bin.count);
      frame.parts.push(
        `<rect class="bin" x="${fmt(x0)}" y="${fmt(py)}" ` +
        `width="${fmt(x1 - x0)}" height="${fmt(frame.plotHeight - py)}" ` +
        `fill="${color}" fill-opacity="0.55">` +
        `<title>[${bin.start}, ${bin.start + width}): ${bin.count}</title></rect>`);
    }
  }
  drawLegend(frame, [[labelA, PALETTE[0]], [labelB, PALETTE[1]]]);
  return { svg: finish(frame), warnings };
}
