// A completed run directory: manifest plus whichever CSVs its experiments emitted.

import { existsSync, readFileSync } from 'fs';
import { join } from 'path';

import { readCsv, Table } from './csv.js';

export const SCHEMAS = {
  'energies.csv': ['t', 'component', 'kind', 'value'],
  'decay.csv': ['t', 'component', 'weight_kind', 'weighted_sup'],
  'growth.csv': [
    'Q', 'foliation', 't_or_s', 'integral', 'c0', 'c1', 'se_c1',
    'rate_exponent', 'rate_exponent_se', 'trailing_increase', 'classification',
  ],
  'growth_series.csv': ['Q', 'foliation', 't_or_s', 'integral'],
  'picard.csv': [
    'eps', 'k', 'd_k', 'rho_k', 'x_norm_total', 'tier_energy', 'tier_sup_psi', 'tier_sup_phi',
  ],
  'constants.csv': ['check', 't', 'value'],
  'identity_report.csv': ['check_name', 'samples', 'max_residual', 'scale', 'pass'],
} as const;

export type CsvName = keyof typeof SCHEMAS;

export interface Manifest {
  subcommand: string;
  config_hash: string;
  code_version: string;
  seed: number;
  files: Record<string, number>;
  deviations: string[];
}

export interface Run {
  dir: string;
  manifest: Manifest;
  tables: Partial<Record<CsvName, Table>>;
}

/** Load a run directory; refuses directories without a manifest. */
export function loadRun(dir: string): Run {
  const manifestPath = join(dir, 'manifest.json');
  if (!existsSync(manifestPath)) {
    throw new Error(`${dir}: no manifest.json - not a completed run directory`);
  }
  const manifest = JSON.parse(readFileSync(manifestPath, 'utf8')) as Manifest;
  const tables: Partial<Record<CsvName, Table>> = {};
  for (const name of Object.keys(SCHEMAS) as CsvName[]) {
    const p = join(dir, name);
    if (existsSync(p)) {
      tables[name] = readCsv(p, SCHEMAS[name]);
    }
  }
  return { dir, manifest, tables };
}

/** Merge several run directories (one per subcommand) into one view. */
export function loadRuns(dirs: string[]): Run[] {
  return dirs.map(loadRun);
}
