/** Strict reader for the harness's numeric CSV files. */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  columns: Map<string, number[]>;
  nrows: number;
}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new SchemaError(`${path}: empty file`);
  const header = lines[0].split(",").map((h) => h.trim());
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (let r = 1; r < lines.length; r++) {
    const cells = lines[r].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`${path}: row ${r} has ${cells.length} cells, `
        + `expected ${header.length}`);
    }
    cells.forEach((cell, i) => {
      const v = Number(cell);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${path}: non-numeric value in column '${header[i]}'`);
      }
      columns.get(header[i])!.push(v);
    });
  }
  return { header, columns, nrows: lines.length - 1 };
}

export function requireColumns(t: Table, cols: string[], path: string): void {
  for (const c of cols) {
    if (!t.columns.has(c)) {
      throw new SchemaError(`${path}: missing column '${c}' (have: ${t.header.join(", ")})`);
    }
  }
}

export function requireRows(t: Table, path: string): void {
  if (t.nrows === 0) throw new SchemaError(`${path}: no rows`);
}
