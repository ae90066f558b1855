/**
 * Reader for the simulation CSVs: '#'-prefixed `key = value` metadata
 * lines followed by a papaparse-compatible header + numeric body.
 */
import Papa from "papaparse";

export const SCHEMA_VERSION = "1";

/** The input does not match the expected CSV contract. */
export class SchemaError extends Error {}

export type Cell = number | string;

export interface Table {
  path: string;
  meta: Record<string, string>;
  columns: string[];
  rows: Record<string, Cell>[];
}

const META_LINE = /^#\s*([^=\s]+)\s*=\s*(.*?)\s*$/;

export function parseTable(text: string, path: string): Table {
  const meta: Record<string, string> = {};
  const body: string[] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const m = META_LINE.exec(line);
      if (m) meta[m[1]] = m[2];
    } else if (line.trim() !== "") {
      body.push(line);
    }
  }
  if (meta["schema_version"] !== SCHEMA_VERSION) {
    throw new SchemaError(
      `${path}: schema_version is ` +
      `${meta["schema_version"] ?? "missing"}, expected ${SCHEMA_VERSION}`);
  }
  if (body.length === 0) {
    throw new SchemaError(`${path}: no column header line`);
  }
  const parsed = Papa.parse<Record<string, Cell>>(body.join("\n"), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`${path}: ${e.message} (row ${e.row})`);
  }
  return {
    path,
    meta,
    columns: parsed.meta.fields ?? [],
    rows: parsed.data,
  };
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`${table.path}: missing column '${name}'`);
    }
  }
}

/** Numeric column values; non-finite entries are kept (callers filter). */
export function column(table: Table, name: string): number[] {
  requireColumns(table, [name]);
  return table.rows.map((row) => Number(row[name]));
}
