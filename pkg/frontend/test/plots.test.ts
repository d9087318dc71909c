import { readdirSync, readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { filterRows, parseCsv, requireColumns } from "../src/csv.js";
import { buildScalingFigures, buildTrajectoryFigures, renderAll } from "../src/figures.js";
import { fittedChecks, loadRun } from "../src/manifest.js";
import { renderScalingFigure } from "../src/scaling.js";
import { LogScale } from "../src/svg.js";
import { parseArgs, main } from "../src/cli.js";
import { makeRun } from "./fixture.js";

describe("csv", () => {
  it("parses typed cells", () => {
    const t = parseCsv("a,b,c\n1.5,xyz,2.000000000000e-01\n");
    expect(t.columns).toEqual(["a", "b", "c"]);
    expect(t.rows[0]).toEqual({ a: 1.5, b: "xyz", c: 0.2 });
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/ragged/);
  });

  it("rejects an empty file", () => {
    expect(() => parseCsv("")).toThrow(/empty CSV/);
  });

  it("filters with numeric tolerance", () => {
    const rows = [{ t: 2.0000000000000004, seed: "p" }, { t: 1.0, seed: "p" }];
    expect(filterRows(rows, { t: 2.0, seed: "p" })).toHaveLength(1);
  });

  it("reports missing columns by name", () => {
    const t = parseCsv("a,b\n1,2\n");
    expect(() => requireColumns(t, ["zz"], "demo")).toThrow(/'zz'/);
  });
});

describe("log scale", () => {
  it("maps endpoints to the pixel range", () => {
    const s = new LogScale([0.01, 1.0], 0, 100, 0);
    expect(s.map(0.01)).toBeCloseTo(0);
    expect(s.map(1.0)).toBeCloseTo(100);
  });

  it("emits decade ticks inside the range", () => {
    const s = new LogScale([0.004, 2.0], 0, 100, 0);
    expect(s.ticks()).toEqual([0.01, 0.1, 1]);
  });
});

describe("run loading", () => {
  it("loads manifest and tables", () => {
    const dir = makeRun();
    const run = loadRun(dir);
    expect(run.manifest.config_name).toBe("fixture");
    expect(run.tables["gaps"].rows).toHaveLength(4);
    expect(fittedChecks(run.manifest)).toEqual(["position_gap"]);
  });

  it("rejects unknown schema versions", () => {
    const dir = makeRun();
    const manifest = JSON.parse(readFileSync(join(dir, "manifest.json"), "utf-8"));
    manifest.schema_version = 99;
    const fs = require("node:fs");
    fs.writeFileSync(join(dir, "manifest.json"), JSON.stringify(manifest));
    expect(() => loadRun(dir)).toThrow(/schema v99/);
  });
});

describe("scaling figures", () => {
  it("annotates the slope with the manifest value to three decimals", () => {
    const run = loadRun(makeRun());
    const figs = buildScalingFigures(run);
    expect(figs).toHaveLength(1);
    expect(figs[0].name).toBe("position_gap.svg");
    expect(figs[0].svg).toContain("slope 2.004");
    expect(figs[0].svg).toContain("expected 2.0");
  });

  it("greys out-of-regime points", () => {
    const run = loadRun(makeRun());
    const svg = buildScalingFigures(run)[0].svg;
    expect(svg).toContain('fill="#bbb"');   // the alpha=0.05 row
    expect(svg).toContain('fill="#1a6"');
  });

  it("notes skipped fits instead of inventing a line", () => {
    const run = loadRun(makeRun({ skipFit: true }));
    const svg = buildScalingFigures(run)[0].svg;
    expect(svg).toContain("fit skipped");
    expect(svg).not.toContain("slope 2.004");
  });

  it("fails loudly on a missing column", () => {
    const run = loadRun(makeRun());
    run.manifest.checks["position_gap"].fits!["alpha"].quantity = "nope";
    expect(() => buildScalingFigures(run)).toThrow(/missing required column/);
  });

  it("is deterministic", () => {
    const dir = makeRun();
    const a = buildScalingFigures(loadRun(dir))[0].svg;
    const b = buildScalingFigures(loadRun(dir))[0].svg;
    expect(a).toBe(b);
  });

  it("renders a reference guide and a fit line", () => {
    const run = loadRun(makeRun());
    const svg = renderScalingFigure(
      buildScalingFigures(run).length > 0
        ? [
            {
              check: "position_gap",
              fitName: "alpha",
              fit: run.manifest.checks["position_gap"].fits!["alpha"],
              table: run.tables["gaps"],
              tableName: "gaps",
            },
          ]
        : [],
    );
    expect(svg).toContain('stroke="#c33"');          // fitted line
    expect(svg).toContain("stroke-dasharray");       // reference guide
  });
});

describe("trajectory figures", () => {
  it("renders an overlay with a growing gap inset", () => {
    const run = loadRun(makeRun());
    const figs = buildTrajectoryFigures(run);
    expect(figs).toHaveLength(1);
    expect(figs[0].svg).toContain("x1 - x2 projection");
    expect(figs[0].svg).toContain("spatial gap vs t");
    expect(figs[0].svg).toContain("gap: 2.50e-5 to 4.00e-4");
  });

  it("marks coincident orbits with a flat zero inset", () => {
    const run = loadRun(makeRun({ coincident: true }));
    const svg = buildTrajectoryFigures(run)[0].svg;
    expect(svg).toContain("gap = 0");
  });
});

describe("cli", () => {
  it("requires --run-dir", () => {
    expect(() => parseArgs([])).toThrow(/--run-dir/);
  });

  it("rejects unknown flags", () => {
    expect(() => parseArgs(["--frobnicate"])).toThrow(/unknown argument/);
  });

  it("writes one figure per fitted check plus overlays", () => {
    const dir = makeRun();
    const code = main(["--run-dir", dir]);
    expect(code).toBe(0);
    const names = readdirSync(join(dir, "figures")).sort();
    expect(names).toContain("position_gap.svg");
    expect(names.some((n) => n.startsWith("trajectory_probe_narrow"))).toBe(true);
  });

  it("respects --only", () => {
    const dir = makeRun();
    const code = main(["--run-dir", dir, "--out", join(dir, "only")]);
    expect(code).toBe(0);
    const code2 = main([
      "--run-dir", dir, "--only", "position_gap", "--out", join(dir, "only2"),
    ]);
    expect(code2).toBe(0);
    expect(readdirSync(join(dir, "only2"))).toEqual(["position_gap.svg"]);
  });

  it("returns 1 for a missing run directory", () => {
    expect(main(["--run-dir", "/nonexistent/run"])).toBe(1);
  });

  it("produces byte-identical output on repeated runs", () => {
    const dir = makeRun();
    main(["--run-dir", dir, "--out", join(dir, "f1")]);
    main(["--run-dir", dir, "--out", join(dir, "f2")]);
    for (const name of readdirSync(join(dir, "f1"))) {
      expect(readFileSync(join(dir, "f1", name), "utf-8")).toBe(
        readFileSync(join(dir, "f2", name), "utf-8"),
      );
    }
  });
});
