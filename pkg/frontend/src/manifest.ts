/** Typed view of a run directory: manifest plus result tables. */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { parseCsv, Table } from "./csv.js";

export interface FitEntry {
  quantity: string;
  abscissa: string;
  exponent?: number;
  prefactor?: number;
  r_squared?: number;
  n_points?: number;
  expected_exponent?: number;
  tolerance?: number;
  passed?: boolean;
  skipped?: string;
  table?: string;
  filter?: Record<string, unknown>;
}

export interface CheckEntry {
  passed?: boolean;
  vacuous?: boolean;
  fits?: Record<string, FitEntry>;
  [key: string]: unknown;
}

export interface Manifest {
  schema_version: number;
  config_name: string;
  config_hash: string;
  checks: Record<string, CheckEntry>;
  tables?: Record<string, string>;
  all_passed: boolean;
  [key: string]: unknown;
}

export interface RunDir {
  dir: string;
  manifest: Manifest;
  tables: Record<string, Table>;
}

export const SUPPORTED_SCHEMA = 1;

export function loadRun(dir: string): RunDir {
  const manifest = JSON.parse(
    readFileSync(join(dir, "manifest.json"), "utf-8"),
  ) as Manifest;
  if (manifest.schema_version !== SUPPORTED_SCHEMA) {
    throw new Error(
      `run schema v${manifest.schema_version} is not supported ` +
        `(expected v${SUPPORTED_SCHEMA})`,
    );
  }
  const tables: Record<string, Table> = {};
  const names = manifest.tables ?? {
    gaps: "gaps.csv",
    fluid: "fluid.csv",
    closure: "closure.csv",
    trajectories: "trajectories.csv",
  };
  for (const [key, file] of Object.entries(names)) {
    tables[key] = parseCsv(readFileSync(join(dir, file), "utf-8"));
  }
  return { dir, manifest, tables };
}

/** Checks that carry at least one fit entry (skipped ones included). */
export function fittedChecks(manifest: Manifest): string[] {
  return Object.keys(manifest.checks)
    .filter((name) => {
      const fits = manifest.checks[name].fits;
      return fits !== undefined && Object.keys(fits).length > 0;
    })
    .sort();
}
