#!/usr/bin/env node
// kgzlab-report render --in DIR [--in DIR2 ...] --out DIR [--figures LIST]
//
// Reads completed run directories (manifest + CSVs only, never checkpoints),
// writes SVG figures and a single-page summary.html.  Read-only on inputs
// and idempotent: identical inputs produce identical outputs.

import { mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';

import { evaluateChecks } from './checks.js';
import { decayFigure, energiesFigure, FIGURE_KINDS, growthFigure, picardFigure } from './figures.js';
import { loadRuns, CsvName, Run } from './run.js';
import { summaryHtml } from './summary.js';

interface Args {
  inputs: string[];
  out: string;
  figures: string[];
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], out: 'report', figures: [...FIGURE_KINDS] };
  if (argv[0] !== 'render') {
    throw new Error(`unknown command ${argv[0] ?? '(none)'}; usage: render --in DIR --out DIR`);
  }
  for (let i = 1; i < argv.length; i++) {
    switch (argv[i]) {
      case '--in':
        args.inputs.push(argv[++i]);
        break;
      case '--out':
        args.out = argv[++i];
        break;
      case '--figures':
        args.figures = argv[++i].split(',').map((s) => s.trim());
        break;
      default:
        throw new Error(`unknown flag ${argv[i]}`);
    }
  }
  if (args.inputs.length === 0) throw new Error('at least one --in DIR is required');
  for (const f of args.figures) {
    if (!(FIGURE_KINDS as readonly string[]).includes(f)) {
      throw new Error(`unknown figure kind ${f}; known: ${FIGURE_KINDS.join(', ')}`);
    }
  }
  return args;
}

function merged(runs: Run[], name: CsvName) {
  const tables = runs.map((r) => r.tables[name]).filter((t) => t !== undefined);
  if (tables.length === 0) return undefined;
  return { header: tables[0]!.header, rows: tables.flatMap((t) => t!.rows) };
}

export function render(args: Args): string[] {
  const runs = loadRuns(args.inputs);
  mkdirSync(args.out, { recursive: true });
  const written: string[] = [];

  const energies = merged(runs, 'energies.csv');
  const decay = merged(runs, 'decay.csv');
  const growth = merged(runs, 'growth.csv');
  const growthSeries = merged(runs, 'growth_series.csv');
  const picard = merged(runs, 'picard.csv');

  const figureFiles: string[] = [];
  const emit = (name: string, svg: string) => {
    writeFileSync(join(args.out, name), svg);
    written.push(name);
    figureFiles.push(name);
  };

  if (args.figures.includes('energies') && energies && energies.rows.length) {
    const flat = { header: energies.header, rows: energies.rows.filter((r) => !r[2].startsWith('hyperboloidal')) };
    if (flat.rows.length) emit('energies.svg', energiesFigure(flat));
  }
  if (args.figures.includes('decay') && decay && decay.rows.length) {
    emit('decay.svg', decayFigure(decay));
  }
  if (args.figures.includes('picard') && picard && picard.rows.length) {
    emit('picard.svg', picardFigure(picard));
  }
  if (args.figures.includes('growth') && growth && growthSeries && growthSeries.rows.length) {
    emit('growth_flat.svg', growthFigure(growthSeries, growth, 'flat'));
    emit('growth_hyperboloidal.svg', growthFigure(growthSeries, growth, 'hyperboloidal'));
  }

  const checks = evaluateChecks({
    identity: merged(runs, 'identity_report.csv'),
    energies,
    decay,
    constants: merged(runs, 'constants.csv'),
    growth,
    picard,
  });
  writeFileSync(
    join(args.out, 'summary.html'),
    summaryHtml(checks, figureFiles, runs.map((r) => r.manifest)),
  );
  written.push('summary.html');
  return written;
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('render.js') || entry.endsWith('kgzlab-report')) {
  try {
    const files = render(parseArgs(process.argv.slice(2)));
    console.log(`wrote ${files.join(', ')}`);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exit(1);
  }
}
