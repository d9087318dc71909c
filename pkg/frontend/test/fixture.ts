/** Synthetic run directory with known fits and rows, for tests. */

import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function gapCsv(): string {
  const header =
    "check,scenario,strength,profile,alpha,rapidity,energy0,seed,t," +
    "pos_gap_mean,pos_gap_lab,vel_gap_mean,vel_gap_lab,f_gap,theta2," +
    "theta2_bar,dlogE_dt,norm_drift,alpha_t,energy_t,in_regime";
  const rows: string[] = [];
  for (const [alpha, inR] of [
    [0.4, 1],
    [0.2, 1],
    [0.1, 1],
    [0.05, 0],
  ] as Array<[number, number]>) {
    const gap = 0.125 * alpha * alpha;
    rows.push(
      [
        "trajectory_gap", "uniform_b", "1.000000000000e-01", "ball",
        alpha.toExponential(12), "3.000000000000e+00",
        Math.cosh(3).toExponential(12), "probe_narrow",
        "2.000000000000e+00", gap.toExponential(12), gap.toExponential(12),
        gap.toExponential(12), gap.toExponential(12), "0.000000000000e+00",
        "1.000000000000e-03", "1.000000000000e-03", "0.000000000000e+00",
        "1.000000000000e-09", alpha.toExponential(12),
        "1.006766199578e+01", String(inR),
      ].join(","),
    );
  }
  return header + "\n" + rows.join("\n") + "\n";
}

export function trajCsv(coincident: boolean): string {
  const header =
    "check,scenario,alpha,rapidity,seed,t,x0_lorentz,x1_lorentz,x2_lorentz," +
    "x3_lorentz,x0_averaged,x1_averaged,x2_averaged,x3_averaged";
  const rows: string[] = [];
  for (const t of [0.5, 1.0, 2.0]) {
    const x1 = t;
    const x2 = 0.1 * t * t;
    const off = coincident ? 0 : 1e-4 * t * t;
    rows.push(
      [
        "trajectory_gap", "uniform_b", "1.000000000000e-01",
        "3.000000000000e+00", "probe_narrow", t.toExponential(12),
        t.toExponential(12), x1.toExponential(12), x2.toExponential(12),
        "0.000000000000e+00", t.toExponential(12),
        (x1 + off).toExponential(12), x2.toExponential(12),
        "0.000000000000e+00",
      ].join(","),
    );
  }
  return header + "\n" + rows.join("\n") + "\n";
}

export function makeRun(opts: { coincident?: boolean; skipFit?: boolean } = {}): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-fixture-"));
  const fitAlpha = opts.skipFit
    ? {
        skipped: "need at least 3 positive points",
        quantity: "pos_gap_mean",
        abscissa: "alpha",
        table: "gaps",
        filter: { seed: "probe_narrow", t: 2.0 },
      }
    : {
        quantity: "pos_gap_mean",
        abscissa: "alpha",
        exponent: 2.0041,
        prefactor: 0.125,
        r_squared: 0.9999,
        n_points: 3,
        expected_exponent: 2.0,
        tolerance: 0.3,
        passed: true,
        table: "gaps",
        filter: { seed: "probe_narrow", t: 2.0 },
      };
  const manifest = {
    schema_version: 1,
    config_name: "fixture",
    config_hash: "deadbeef",
    all_passed: true,
    failures: [],
    checks: {
      position_gap: { passed: true, fits: { alpha: fitAlpha } },
      spray_identity: { passed: true, worst_deviation: 1e-13 },
    },
    tables: {
      gaps: "gaps.csv",
      trajectories: "trajectories.csv",
    },
  };
  writeFileSync(join(dir, "manifest.json"), JSON.stringify(manifest, null, 2));
  writeFileSync(join(dir, "gaps.csv"), gapCsv());
  writeFileSync(join(dir, "trajectories.csv"), trajCsv(opts.coincident ?? false));
  return dir;
}
