/**
 * Minimal SVG string building: linear scales, tick generation, and the
 * chart frame (axes, labels, title, legend) shared by all three chart kinds.
 * Pure string output, so identical inputs give byte-identical files.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const MARGIN: Margin = { top: 34, right: 18, bottom: 48, left: 72 };

export const PALETTE = ["#2563eb", "#dc2626", "#059669", "#9333ea", "#ea580c"];

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Fixed-precision coordinate so float noise never leaks into the markup. */
export function fmt(value: number): string {
  const rounded = Number(value.toFixed(2));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export class LinearScale {
  constructor(
    private readonly d0: number,
    private readonly d1: number,
    private readonly r0: number,
    private readonly r1: number,
  ) {}

  at(value: number): number {
    if (this.d1 === this.d0) {
      return (this.r0 + this.r1) / 2;
    }
    const t = (value - this.d0) / (this.d1 - this.d0);
    return this.r0 + t * (this.r1 - this.r0);
  }
}

/** Round ticks covering [min, max]: 1/2/5 steps, around `count` of them. */
export function ticks(min: number, max: number, count = 5): number[] {
  if (min === max) {
    return [min];
  }
  const span = max - min;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((c) => span / c <= count) ?? 10 * step;
  const out: number[] = [];
  for (let v = Math.ceil(min / chosen) * chosen; v <= max + chosen / 1e6; v += chosen) {
    out.push(Number(v.toFixed(10)));
  }
  return out;
}

export interface Frame {
  width: number;
  height: number;
  plotWidth: number;
  plotHeight: number;
  parts: string[];
}

export function newFrame(width: number, height: number, title: string): Frame {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  ];
  if (title) {
    parts.push(
      `<text x="${fmt(width / 2)}" y="20" text-anchor="middle" ` +
      `font-size="14" font-weight="bold">${esc(title)}</text>`);
  }
  parts.push(`<g transform="translate(${MARGIN.left},${MARGIN.top})">`);
  return {
    width,
    height,
    plotWidth: width - MARGIN.left - MARGIN.right,
    plotHeight: height - MARGIN.top - MARGIN.bottom,
    parts,
  };
}

export function drawAxes(
  frame: Frame,
  x: LinearScale, xTicks: number[], xLabel: string,
  y: LinearScale, yTicks: number[], yLabel: string,
  xTickText: (v: number) => string = String,
): void {
  const { plotWidth: w, plotHeight: h, parts } = frame;
  parts.push(`<g stroke="#111" fill="none">` +
    `<line x1="0" y1="${fmt(h)}" x2="${fmt(w)}" y2="${fmt(h)}"/>` +
    `<line x1="0" y1="0" x2="0" y2="${fmt(h)}"/></g>`);
  for (const tick of xTicks) {
    const px = x.at(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(h)}" x2="${fmt(px)}" y2="${fmt(h + 5)}" stroke="#111"/>` +
      `<text x="${fmt(px)}" y="${fmt(h + 18)}" text-anchor="middle">${esc(xTickText(tick))}</text>`);
  }
  for (const tick of yTicks) {
    const py = y.at(tick);
    parts.push(
      `<line x1="-5" y1="${fmt(py)}" x2="0" y2="${fmt(py)}" stroke="#111"/>` +
      `<line x1="0" y1="${fmt(py)}" x2="${fmt(w)}" y2="${fmt(py)}" stroke="#eee"/>` +
      `<text x="-9" y="${fmt(py + 4)}" text-anchor="end">${esc(String(tick))}</text>`);
  }
  parts.push(
    `<text x="${fmt(w / 2)}" y="${fmt(h + 38)}" text-anchor="middle">${esc(xLabel)}</text>`);
  parts.push(
    `<text transform="translate(${fmt(-MARGIN.left + 14)},${fmt(h / 2)}) rotate(-90)" ` +
    `text-anchor="middle">${esc(yLabel)}</text>`);
}

export function drawLegend(frame: Frame, entries: [string, string][]): void {
  let tx = frame.plotWidth - 10;
  const rows = entries.map(([label, color], i) =>
    `<g transform="translate(0,${i * 18})">` +
    `<rect width="12" height="12" fill="${color}"/>` +
    `<text x="17" y="10">${esc(label)}</text></g>`);
  frame.parts.push(
    `<g class="legend" transform="translate(${fmt(tx - 90)},6)">${rows.join("")}</g>`);
}

export function finish(frame: Frame): string {
  return frame.parts.join("\n") + "\n</g>\n</svg>\n";
}
