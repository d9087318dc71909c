/**
 * Orbit-pair overlays: the two flows from one seed in two spatial
 * projections, with a gap-versus-time inset (log gap when positive).
 */

import { filterRows, requireColumns, Row, Table } from "./csv.js";
import {
  circle,
  document as svgDocument,
  line,
  polyline,
  text,
} from "./svg.js";

const W = 900;
const H = 340;
const PANEL = { w: 300, h: 300, top: 28 };

interface Group {
  alpha: number;
  rapidity: number;
  seed: string;
  rows: Row[];
}

export function trajectoryGroups(table: Table): Group[] {
  requireColumns(
    table,
    ["alpha", "rapidity", "seed", "t", "x1_lorentz", "x2_lorentz"],
    "trajectories",
  );
  const keyed = new Map<string, Group>();
  for (const r of table.rows) {
    const key = `${r["alpha"]}|${r["rapidity"]}|${r["seed"]}`;
    if (!keyed.has(key)) {
      keyed.set(key, {
        alpha: Number(r["alpha"]),
        rapidity: Number(r["rapidity"]),
        seed: String(r["seed"]),
        rows: [],
      });
    }
    keyed.get(key)!.rows.push(r);
  }
  const groups = Array.from(keyed.values());
  groups.forEach((g) => g.rows.sort((a, b) => Number(a["t"]) - Number(b["t"])));
  groups.sort(
    (a, b) =>
      a.seed.localeCompare(b.seed) || a.alpha - b.alpha ||
      a.rapidity - b.rapidity,
  );
  return groups;
}

function linScale(vals: number[], pixLo: number, pixHi: number) {
  let lo = Math.min(...vals);
  let hi = Math.max(...vals);
  if (hi - lo < 1e-12) {
    lo -= 1;
    hi += 1;
  }
  const pad = 0.08 * (hi - lo);
  lo -= pad;
  hi += pad;
  const a = (pixHi - pixLo) / (hi - lo);
  return (v: number) => a * (v - lo) + pixLo;
}

function projectionPanel(
  g: Group,
  ax: number,
  ay: number,
  x0: number,
  title: string,
): string {
  const parts: string[] = [];
  const cols = [`x${ax}_lorentz`, `x${ay}_lorentz`, `x${ax}_averaged`, `x${ay}_averaged`];
  const xs = g.rows.flatMap((r) => [Number(r[cols[0]]), Number(r[cols[2]])]);
  const ys = g.rows.flatMap((r) => [Number(r[cols[1]]), Number(r[cols[3]])]);
  const sx = linScale(xs, x0 + 46, x0 + PANEL.w - 12);
  const sy = linScale(ys, PANEL.h + PANEL.top - 36, PANEL.top + 12);
  const ptsL: Array<[number, number]> = g.rows.map((r) => [
    sx(Number(r[cols[0]])),
    sy(Number(r[cols[1]])),
  ]);
  const ptsA: Array<[number, number]> = g.rows.map((r) => [
    sx(Number(r[cols[2]])),
    sy(Number(r[cols[3]])),
  ]);
  parts.push(text(x0 + 46, PANEL.top, title, { "font-weight": "bold" }));
  parts.push(polyline(ptsL, { stroke: "#16c", "stroke-width": 1.6 }));
  parts.push(
    polyline(ptsA, {
      stroke: "#c33",
      "stroke-width": 1.4,
      "stroke-dasharray": "6,3",
    }),
  );
  for (const [px, py] of ptsL) parts.push(circle(px, py, 2.6, { fill: "#16c" }));
  for (const [px, py] of ptsA) parts.push(circle(px, py, 2.2, { fill: "#c33" }));
  return parts.join("\n");
}

function gapInset(g: Group, x0: number): string {
  const parts: string[] = [];
  const gaps = g.rows.map((r) => {
    let s = 0;
    for (const ax of [1, 2, 3]) {
      const d =
        Number(r[`x${ax}_averaged`]) - Number(r[`x${ax}_lorentz`]);
      s += d * d;
    }
    return { t: Number(r["t"]), gap: Math.sqrt(s) };
  });
  const left = x0 + 52;
  const right = x0 + PANEL.w - 12;
  const bottom = PANEL.h + PANEL.top - 36;
  const top = PANEL.top + 12;
  parts.push(text(x0 + 52, PANEL.top, "spatial gap vs t", { "font-weight": "bold" }));
  parts.push(line(left, bottom, right, bottom));
  parts.push(line(left, top, left, bottom));
  const st = linScale(gaps.map((p) => p.t), left, right);
  const positive = gaps.filter((p) => p.gap > 0);
  if (positive.length === 0) {
    // coincident orbits: flat zero marker line
    parts.push(
      line(left, bottom - 2, right, bottom - 2, {
        stroke: "#1a6",
        "stroke-width": 1.6,
      }),
    );
    parts.push(text(left + 8, top + 12, "gap = 0", { fill: "#1a6" }));
  } else {
    const logs = positive.map((p) => Math.log10(p.gap));
    const sg = linScale(logs, bottom, top);
    const pts: Array<[number, number]> = positive.map((p) => [
      st(p.t),
      sg(Math.log10(p.gap)),
    ]);
    parts.push(polyline(pts, { stroke: "#1a6", "stroke-width": 1.6 }));
    for (const [px, py] of pts) parts.push(circle(px, py, 2.6, { fill: "#1a6" }));
    const g0 = positive[0];
    const g1 = positive[positive.length - 1];
    parts.push(
      text(left + 8, top + 12,
           `gap: ${g0.gap.toExponential(2)} to ${g1.gap.toExponential(2)}`,
           { fill: "#1a6" }),
    );
  }
  return parts.join("\n");
}

export function renderTrajectoryFigure(g: Group): string {
  const header = text(
    10,
    16,
    `orbit pair: seed ${g.seed}, alpha ${g.alpha}, rapidity ${g.rapidity} ` +
      `(solid: force orbit, dashed: averaged orbit)`,
    { "font-size": 12 },
  );
  const body = [
    header,
    projectionPanel(g, 1, 2, 0, "x1 - x2 projection"),
    projectionPanel(g, 1, 3, PANEL.w, "x1 - x3 projection"),
    gapInset(g, 2 * PANEL.w),
  ].join("\n");
  return svgDocument(W, H, body);
}
