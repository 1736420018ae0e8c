import { readFileSync } from 'fs';
import Papa from 'papaparse';
import { SchemaError, checkHeader } from './schema.js';

export type Row = Record<string, string>;

/** Load an experiment CSV, enforcing the documented header and nonempty data. */
export function loadCsv(path: string, experiment: string): Row[] {
  let text: string;
  try {
    text = readFileSync(path, 'utf8');
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const lines = parsed.data;
  if (lines.length === 0) {
    throw new SchemaError(`${path} is empty`);
  }
  checkHeader(experiment, lines[0]);
  if (lines.length === 1) {
    throw new SchemaError(`${path} contains a header but no data rows`);
  }
  const header = lines[0];
  return lines.slice(1).map((fields) => {
    const row: Row = {};
    header.forEach((name, i) => {
      row[name] = fields[i] ?? '';
    });
    return row;
  });
}

export function num(row: Row, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`non-numeric value '${row[column]}' in column ${column}`);
  }
  return value;
}

/** Rows with ok status and a usable value in the given column. */
export function okRows(rows: Row[], valueColumn: string): Row[] {
  return rows.filter(
    (row) => (row.status === undefined || row.status === 'ok') && row[valueColumn] !== '',
  );
}
