/**
 * Strict CSV reading for the solver's output files.
 *
 * All inputs share the same shape: one header row naming the columns,
 * comma-separated numeric cells, LF line endings. Empty cells are allowed
 * (ragged singular-value columns) and come back as NaN.
 */

import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: number[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string, source: string): Table {
  const lines = text
    .split("\n")
    .map((line) => line.replace(/\r$/, ""))
    .filter((line, i, all) => !(line === "" && i === all.length - 1));
  if (lines.length < 2) {
    throw new CsvError(`${source}: expected a header row and at least one data row`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `${source}: row ${i} has ${cells.length} cells, header has ${header.length}`
      );
    }
    const row = cells.map((cell) => {
      const trimmed = cell.trim();
      if (trimmed === "") return NaN;
      const value = Number(trimmed);
      if (!Number.isFinite(value)) {
        throw new CsvError(`${source}: row ${i} has a non-numeric cell "${cell}"`);
      }
      return value;
    });
    rows.push(row);
  }
  return { header, rows };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

/** Extract one named column; errors if the header lacks it. */
export function column(table: Table, name: string, source = "csv"): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`${source}: missing column "${name}" (have: ${table.header.join(", ")})`);
  }
  return table.rows.map((row) => row[idx]);
}
