import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";

const GOLDEN = fileURLToPath(new URL("./golden", import.meta.url));

function tmp(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "figcli-")), name);
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("cli", () => {
  it("sweep-bars writes an SVG and exits 0", () => {
    const log = vi.spyOn(console, "log").mockImplementation(() => {});
    const out = tmp("sweep.svg");
    const code = main(["sweep-bars", "--grid", join(GOLDEN, "grid.csv"),
                       "--out", out, "--title", "sweep"]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf8")).toMatch(/^<svg/);
    expect(log).toHaveBeenCalledWith(`wrote ${out}`);
  });

  it("rolling-line and histogram-overlay both exit 0 on the goldens", () => {
    vi.spyOn(console, "log").mockImplementation(() => {});
    const roll = tmp("rolling.svg");
    expect(main(["rolling-line",
                 "--a", join(GOLDEN, "rolling_proposed.csv"),
                 "--b", join(GOLDEN, "rolling_fixed.csv"),
                 "--out", roll])).toBe(0);
    const hist = tmp("hist.svg");
    expect(main(["histogram-overlay",
                 "--a", join(GOLDEN, "histogram_proposed.csv"),
                 "--b", join(GOLDEN, "histogram_fixed.csv"),
                 "--out", hist, "--range", "0,100000"])).toBe(0);
    expect(readFileSync(roll, "utf8")).toContain("<polyline");
    expect(readFileSync(hist, "utf8")).toContain('class="bin"');
  });

  it("reports a missing column on stderr and exits 2", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const bad = tmp("bad.csv");
    writeFileSync(bad, "P,K,seed\n0.1,1,7\n");
    const code = main(["sweep-bars", "--grid", bad, "--out", tmp("x.svg")]);
    expect(code).toBe(2);
    const text = err.mock.calls.map((c) => String(c[0])).join("\n");
    expect(text).toMatch(/missing column "mean_median_ms"/);
  });

  it("rejects an unknown flag", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main(["sweep-bars", "--grid", join(GOLDEN, "grid.csv"),
                       "--out", tmp("x.svg"), "--warp", "9"]);
    expect(code).toBe(2);
    expect(err).toHaveBeenCalled();
  });

  it("rejects a missing required flag by name", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main(["rolling-line", "--a", join(GOLDEN, "rolling_proposed.csv"),
                       "--out", tmp("x.svg")]);
    expect(code).toBe(2);
    const text = err.mock.calls.map((c) => String(c[0])).join("\n");
    expect(text).toMatch(/--b is required/);
  });

  it("rejects a malformed --range", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main(["histogram-overlay",
                       "--a", join(GOLDEN, "histogram_proposed.csv"),
                       "--b", join(GOLDEN, "histogram_fixed.csv"),
                       "--out", tmp("x.svg"), "--range", "100,100"]);
    expect(code).toBe(2);
    const text = err.mock.calls.map((c) => String(c[0])).join("\n");
    expect(text).toMatch(/--range expects LO,HI/);
  });

  it("prints usage for an unknown subcommand", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["scatter"])).toBe(2);
    const text = err.mock.calls.map((c) => String(c[0])).join("\n");
    expect(text).toContain("usage: pnsim-figures");
  });
});
