/** Figure assembly for a run directory: one SVG per fitted check plus the
 * orbit-pair overlay for the first comparison group. */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { fittedChecks, RunDir } from "./manifest.js";
import { PanelSpec, renderScalingFigure } from "./scaling.js";
import { renderTrajectoryFigure, trajectoryGroups } from "./trajectories.js";

export interface RenderedFigure {
  name: string;
  svg: string;
}

export function buildScalingFigures(run: RunDir, only?: string): RenderedFigure[] {
  const out: RenderedFigure[] = [];
  for (const check of fittedChecks(run.manifest)) {
    if (only !== undefined && check !== only) continue;
    const fits = run.manifest.checks[check].fits!;
    const panels: PanelSpec[] = [];
    for (const fitName of Object.keys(fits).sort()) {
      const fit = fits[fitName];
      const tableName = fit.table ?? "gaps";
      const table = run.tables[tableName];
      if (table === undefined) {
        throw new Error(`fit ${check}/${fitName} references unknown table ` +
          `'${tableName}'`);
      }
      panels.push({ check, fitName, fit, table, tableName });
    }
    if (panels.length > 0) {
      out.push({ name: `${check}.svg`, svg: renderScalingFigure(panels) });
    }
  }
  return out;
}

export function buildTrajectoryFigures(run: RunDir, only?: string): RenderedFigure[] {
  if (only !== undefined && only !== "trajectories") return [];
  const table = run.tables["trajectories"];
  if (table === undefined || table.rows.length === 0) return [];
  const groups = trajectoryGroups(table);
  const out: RenderedFigure[] = [];
  const seeds = new Set<string>();
  for (const g of groups) {
    if (seeds.has(g.seed)) continue;   // one representative figure per seed
    seeds.add(g.seed);
    out.push({
      name: `trajectory_${g.seed}_a${g.alpha}_chi${g.rapidity}.svg`,
      svg: renderTrajectoryFigure(g),
    });
  }
  return out;
}

export function renderAll(run: RunDir, outDir: string, only?: string): string[] {
  const figures = [
    ...buildScalingFigures(run, only),
    ...buildTrajectoryFigures(run, only),
  ];
  if (figures.length === 0) {
    throw new Error(only !== undefined
      ? `no figures matched '${only}'`
      : "run directory produced no figures");
  }
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const fig of figures) {
    const path = join(outDir, fig.name);
    writeFileSync(path, fig.svg);
    written.push(path);
  }
  return written;
}
