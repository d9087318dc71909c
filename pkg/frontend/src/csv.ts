/**
 * Minimal CSV reader for the harness tables.
 *
 * The tables are machine-written (no quoting, no embedded commas), so a
 * split-based parser is exact. Numeric-looking cells are converted to
 * numbers; everything else stays a string.
 */

export type Row = Record<string, string | number>;

export interface Table {
  columns: string[];
  rows: Row[];
}

const NUMERIC = /^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const columns = lines[0].split(",");
  const rows: Row[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(
        `ragged CSV row: expected ${columns.length} cells, got ${cells.length}`,
      );
    }
    const row: Row = {};
    columns.forEach((col, i) => {
      const cell = cells[i];
      row[col] = NUMERIC.test(cell) ? Number(cell) : cell;
    });
    rows.push(row);
  }
  return { columns, rows };
}

/** Rows matching every key of the filter (numbers compared with tolerance). */
export function filterRows(rows: Row[], filter: Record<string, unknown>): Row[] {
  return rows.filter((row) =>
    Object.entries(filter).every(([key, want]) => {
      const have = row[key];
      if (typeof want === "number" && typeof have === "number") {
        return Math.abs(have - want) <= 1e-12 * Math.max(1, Math.abs(want));
      }
      return String(have) === String(want);
    }),
  );
}

export function requireColumns(table: Table, needed: string[], name: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new Error(`table ${name} is missing required column '${col}'`);
    }
  }
}
