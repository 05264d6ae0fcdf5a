/**
 * CSV loading with schema checks. Every error names the file and, where it
 * applies, the exact column or row, so a bad input dies with a usable message
 * instead of NaN-shaped charts.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface Table {
  path: string;
  fields: string[];
  rows: Record<string, string>[];
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    const where = first.row === undefined ? "" : ` at row ${first.row + 1}`;
    throw new SchemaError(`${path}: malformed CSV${where} (${first.message})`);
  }
  return { path, fields: parsed.meta.fields ?? [], rows: parsed.data };
}

export function requireColumns(table: Table, columns: string[]): void {
  for (const column of columns) {
    if (!table.fields.includes(column)) {
      throw new SchemaError(`${table.path}: missing column "${column}"`);
    }
  }
}

/** Numeric cell; empty counts as missing and is an error here. */
export function numeric(table: Table, index: number, column: string): number {
  const value = numericOrNull(table, index, column);
  if (value === null) {
    throw new SchemaError(
      `${table.path}: empty value in column "${column}" at data row ${index + 1}`);
  }
  return value;
}

/** Numeric cell where empty means "undefined" (allowed for some columns). */
export function numericOrNull(
  table: Table, index: number, column: string): number | null {
  const raw = table.rows[index][column];
  if (raw === undefined || raw === "") {
    return null;
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(
      `${table.path}: non-numeric value ${JSON.stringify(raw)} in column ` +
      `"${column}" at data row ${index + 1}`);
  }
  return value;
}
