// Strict CSV access for the run outputs: a header row is mandatory and the
// expected columns must match exactly (schema drift fails loudly).

import { readFileSync } from 'fs';

export class ColumnMismatchError extends Error {
  constructor(file: string, expected: readonly string[], got: readonly string[]) {
    super(
      `${file}: column mismatch\n  expected: ${expected.join(',')}\n  got:      ${got.join(',')}`,
    );
    this.name = 'ColumnMismatchError';
  }
}

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length === 0) return { header: [], rows: [] };
  const header = lines[0].split(',');
  const rows = lines.slice(1).map((l) => l.split(','));
  return { header, rows };
}

export function readCsv(path: string, expected: readonly string[]): Table {
  const table = parseCsv(readFileSync(path, 'utf8'));
  if (expected.length !== table.header.length || expected.some((c, i) => c !== table.header[i])) {
    throw new ColumnMismatchError(path, expected, table.header);
  }
  return table;
}

export function column(table: Table, name: string): string[] {
  const i = table.header.indexOf(name);
  if (i < 0) throw new Error(`no column ${name}`);
  return table.rows.map((r) => r[i]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map(Number);
}

/** rows with row[col] === value, as a new table */
export function where(table: Table, col: string, value: string): Table {
  const i = table.header.indexOf(col);
  if (i < 0) throw new Error(`no column ${col}`);
  return { header: table.header, rows: table.rows.filter((r) => r[i] === value) };
}
