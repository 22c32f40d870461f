import { readFileSync } from "fs";

export const CSV_VERSION_LINE = "# riskgmm-csv v1";

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines[0] !== CSV_VERSION_LINE) {
    throw new Error(`schema version mismatch: expected "${CSV_VERSION_LINE}", got "${lines[0]}"`);
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((l) => l.split(","));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new Error(`row has ${row.length} fields, header has ${columns.length}`);
    }
  }
  return { columns, rows };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column: ${name}`);
  }
  return idx;
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((r) => Number(r[idx]));
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((r) => r[idx]);
}

/** Column names matching a prefix, e.g. the risk_theta_* family. */
export function prefixedColumns(table: Table, prefix: string): string[] {
  return table.columns.filter((c) => c.startsWith(prefix));
}
