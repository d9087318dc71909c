/**
 * Log-log scaling panels: scatter of the scanned quantity against its
 * abscissa, the fitted power law, and a reference guide at the expected
 * exponent. Fit values are read from the manifest verbatim (never
 * recomputed here), so the figures cannot disagree with the scan verdicts.
 */

import { filterRows, requireColumns, Row, Table } from "./csv.js";
import { FitEntry } from "./manifest.js";
import {
  circle,
  document as svgDocument,
  el,
  fmt,
  line,
  LogScale,
  text,
  tickLabel,
} from "./svg.js";

export interface PanelSpec {
  check: string;
  fitName: string;
  fit: FitEntry;
  table: Table;
  tableName: string;
}

const PANEL_W = 320;
const PANEL_H = 300;
const MARGIN = { left: 58, right: 16, top: 34, bottom: 44 };

function panelBody(spec: PanelSpec, x0: number): string {
  const { fit } = spec;
  const quantity = fit.quantity;
  const abscissa = fit.abscissa;
  requireColumns(spec.table, [quantity, abscissa], spec.tableName);

  const rows = fit.filter ? filterRows(spec.table.rows, fit.filter) : spec.table.rows;
  const inRegime = (r: Row) =>
    !("in_regime" in r) || Number(r["in_regime"]) === 1;
  const pts = rows
    .map((r) => ({
      x: Number(r[abscissa]),
      y: Number(r[quantity]),
      grey: !inRegime(r),
    }))
    .filter((p) => p.x > 0 && p.y > 0);

  const parts: string[] = [];
  const left = x0 + MARGIN.left;
  const right = x0 + PANEL_W - MARGIN.right;
  const top = MARGIN.top;
  const bottom = PANEL_H - MARGIN.bottom;

  parts.push(line(left, bottom, right, bottom));
  parts.push(line(left, top, left, bottom));
  parts.push(
    text(x0 + PANEL_W / 2, PANEL_H - 10, abscissa, {
      "text-anchor": "middle",
    }),
  );
  parts.push(
    text(x0 + 14, top - 16, `${spec.check} / ${spec.fitName}`, {
      "font-size": 12,
      "font-weight": "bold",
    }),
  );

  if (pts.length === 0 || fit.skipped !== undefined) {
    const note = fit.skipped !== undefined ? "fit skipped" : "no positive points";
    parts.push(
      text(x0 + PANEL_W / 2, (top + bottom) / 2, note, {
        "text-anchor": "middle",
        fill: "#888",
      }),
    );
    parts.push(text(x0 + 14, top - 2, quantity, { fill: "#333" }));
    return parts.join("\n");
  }

  const sx = new LogScale(pts.map((p) => p.x), left, right);
  const sy = new LogScale(pts.map((p) => p.y), bottom, top);

  for (const tx of sx.ticks()) {
    const px = sx.map(tx);
    parts.push(line(px, bottom, px, bottom + 4));
    parts.push(
      text(px, bottom + 16, tickLabel(tx), { "text-anchor": "middle" }),
    );
  }
  for (const ty of sy.ticks()) {
    const py = sy.map(ty);
    parts.push(line(left - 4, py, left, py));
    parts.push(
      text(left - 6, py + 4, tickLabel(ty), { "text-anchor": "end" }),
    );
  }

  const xs = pts.map((p) => p.x);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);

  // fitted power law from the manifest
  if (fit.exponent !== undefined && fit.prefactor !== undefined) {
    const yAt = (x: number) => fit.prefactor! * Math.pow(x, fit.exponent!);
    parts.push(
      line(sx.map(xLo), sy.map(yAt(xLo)), sx.map(xHi), sy.map(yAt(xHi)), {
        stroke: "#c33",
        "stroke-width": 1.5,
      }),
    );
  }

  // reference guide at the expected exponent, anchored at the first point
  if (fit.expected_exponent !== undefined) {
    const p0 = pts[0];
    const yAt = (x: number) =>
      p0.y * Math.pow(x / p0.x, fit.expected_exponent!);
    parts.push(
      line(sx.map(xLo), sy.map(yAt(xLo)), sx.map(xHi), sy.map(yAt(xHi)), {
        stroke: "#888",
        "stroke-dasharray": "5,4",
      }),
    );
  }

  for (const p of pts) {
    parts.push(
      circle(sx.map(p.x), sy.map(p.y), 3.4, {
        fill: p.grey ? "#bbb" : "#1a6",
        stroke: "#123",
        "stroke-width": 0.8,
      }),
    );
  }

  const slopeText =
    fit.exponent !== undefined ? fit.exponent.toFixed(3) : "n/a";
  const expect =
    fit.expected_exponent !== undefined
      ? ` (expected ${fit.expected_exponent.toFixed(1)}±${(
          fit.tolerance ?? 0
        ).toFixed(1)})`
      : "";
  parts.push(
    text(x0 + 14, top - 2, `${quantity}: slope ${slopeText}${expect}`, {
      fill: fit.passed === false ? "#c33" : "#333",
    }),
  );
  return parts.join("\n");
}

/** One figure per check: a row of panels, one per fitted abscissa. */
export function renderScalingFigure(panels: PanelSpec[]): string {
  if (panels.length === 0) {
    throw new Error("no panels to render");
  }
  const body = panels.map((p, i) => panelBody(p, i * PANEL_W)).join("\n");
  return svgDocument(PANEL_W * panels.length, PANEL_H, body);
}

export { PANEL_W, PANEL_H };
