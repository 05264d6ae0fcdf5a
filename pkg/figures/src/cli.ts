/**
 * Command line: one subcommand per chart kind, CSV paths in, one SVG out.
 *
 *   pnsim-figures sweep-bars --grid out/sweep/grid.csv --out fig_sweep.svg
 *   pnsim-figures rolling-line --a out/compare/proposed/rolling.csv \
 *       --b out/compare/fixed/rolling.csv --out fig_rolling.svg
 *   pnsim-figures histogram-overlay --a ...proposed/histogram.csv \
 *       --b ...fixed/histogram.csv --range 6700,7000 --out fig_hist.svg
 */

import { writeFileSync } from "node:fs";
import { parseArgs, ParseArgsConfig } from "node:util";

import { readCsv, SchemaError } from "./csv.js";
import { histogramOverlay } from "./histogramOverlay.js";
import { rollingLine } from "./rollingLine.js";
import { sweepBars } from "./sweepBars.js";

const USAGE = `usage: pnsim-figures <sweep-bars | rolling-line | histogram-overlay> [options]

sweep-bars         --grid GRID.csv --out FIG.svg [--title T]
rolling-line       --a ROLLING.csv --b ROLLING.csv --out FIG.svg
                   [--label-a NAME] [--label-b NAME] [--title T]
histogram-overlay  --a HIST.csv --b HIST.csv --out FIG.svg
                   [--range LO,HI] [--label-a NAME] [--label-b NAME] [--title T]`;

type Opts = Record<string, string | undefined>;

function parse(args: string[], flags: string[], required: string[]): Opts {
  const options: ParseArgsConfig["options"] = {};
  for (const flag of flags) {
    options[flag] = { type: "string" };
  }
  const { values } = parseArgs({ args, options, allowPositionals: false });
  for (const flag of required) {
    if (values[flag] === undefined) {
      throw new SchemaError(`--${flag} is required`);
    }
  }
  return values as Opts;
}

function parseRange(text: string): { lo: number; hi: number } {
  const parts = text.split(",").map(Number);
  if (parts.length !== 2 || parts.some((p) => !Number.isFinite(p)) || parts[0] >= parts[1]) {
    throw new SchemaError(`--range expects LO,HI with LO < HI (got ${JSON.stringify(text)})`);
  }
  return { lo: parts[0], hi: parts[1] };
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    let svg: string;
    let out: string;
    switch (command) {
      case "sweep-bars": {
        const opts = parse(rest, ["grid", "out", "title"], ["grid", "out"]);
        svg = sweepBars(readCsv(opts.grid!), { title: opts.title });
        out = opts.out!;
        break;
      }
      case "rolling-line": {
        const opts = parse(rest, ["a", "b", "out", "label-a", "label-b", "title"],
                           ["a", "b", "out"]);
        svg = rollingLine(readCsv(opts.a!), readCsv(opts.b!),
                          opts["label-a"] ?? "proposed",
                          opts["label-b"] ?? "fixed-random",
                          { title: opts.title });
        out = opts.out!;
        break;
      }
      case "histogram-overlay": {
        const opts = parse(rest,
                           ["a", "b", "out", "range", "label-a", "label-b", "title"],
                           ["a", "b", "out"]);
        const rendered = histogramOverlay(
          readCsv(opts.a!), readCsv(opts.b!),
          opts["label-a"] ?? "proposed", opts["label-b"] ?? "fixed-random",
          { title: opts.title,
            range: opts.range === undefined ? undefined : parseRange(opts.range) });
        for (const warning of rendered.warnings) {
          console.error(`warning: ${warning}`);
        }
        svg = rendered.svg;
        out = opts.out!;
        break;
      }
      default:
        console.error(USAGE);
        return 2;
    }
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof TypeError) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}
