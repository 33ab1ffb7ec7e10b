import assert from 'node:assert/strict';
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import test from 'node:test';

import { evaluateChecks } from '../src/checks.js';
import { ColumnMismatchError, parseCsv, readCsv, where } from '../src/csv.js';
import { decayFigure, growthFigure } from '../src/figures.js';
import { loadRun } from '../src/run.js';
import { parseArgs, render } from '../src/render.js';

function tmp(): string {
  return mkdtempSync(join(tmpdir(), 'kgzlab-report-'));
}

function writeManifest(dir: string, subcommand: string, files: Record<string, number>) {
  writeFileSync(
    join(dir, 'manifest.json'),
    JSON.stringify({
      subcommand,
      config_hash: 'abc123',
      code_version: '0.1.0',
      seed: 0,
      files,
      deviations: subcommand === 'inequalities' ? ['georgiev derivative tier truncated to |I| <= 2'] : [],
    }),
  );
}

function decayCsv(exponent = 1.5): string {
  const lines = ['t,component,weight_kind,weighted_sup'];
  for (let k = 0; k <= 40; k++) {
    const t = 2 + k * 2.5;
    lines.push(`${t},e,1,${(0.01 * Math.pow(t, -exponent)).toExponential(12)}`);
    lines.push(`${t},n,<t+r><t-r>^0.5,${(0.009 + 0.0001 * Math.sin(k)).toExponential(12)}`);
  }
  return lines.join('\n') + '\n';
}

function growthCsv(): string {
  const header =
    'Q,foliation,t_or_s,integral,c0,c1,se_c1,rate_exponent,rate_exponent_se,trailing_increase,classification';
  const rows: string[] = [header];
  const cases: Array<[string, string, string]> = [
    ['(dv)^2', 'bounded', 'bounded'],
    ['du*v', 'bounded', 'bounded'],
    ['null_form', 'bounded', 'bounded'],
    ['(du)^2', 'logarithmic', 'logarithmic'],
    ['u^2', 'logarithmic', 'logarithmic'],
    ['du*dv', 'bounded', 'bounded'],
  ];
  for (const [q, fcls, hcls] of cases) {
    rows.push(`${q},flat,800.0,2.0,0.1,0.5,0.01,1.2,0.01,0.1,${fcls}`);
    rows.push(`${q},hyperboloidal,39.0,1.5,0.1,0.4,0.02,1.3,0.05,0.2,${hcls}`);
  }
  return rows.join('\n') + '\n';
}

function growthSeriesCsv(): string {
  const rows = ['Q,foliation,t_or_s,integral'];
  for (const q of ['(du)^2', 'u^2', '(dv)^2']) {
    for (let k = 1; k <= 30; k++) {
      rows.push(`${q},flat,${5 * k},${Math.log(5 * k).toFixed(6)}`);
      rows.push(`${q},hyperboloidal,${2 + k},${(0.5 * Math.log(2 + k)).toFixed(6)}`);
    }
  }
  return rows.join('\n') + '\n';
}

function picardCsv(): string {
  const rows = ['eps,k,d_k,rho_k,x_norm_total,tier_energy,tier_sup_psi,tier_sup_phi'];
  for (const [eps, rho] of [
    ['0.005', 0.0027],
    ['0.01', 0.0053],
    ['0.02', 0.0106],
    ['0.04', 0.0213],
  ] as const) {
    rows.push(`${eps},0,1e-4,${rho},1e-4,9e-5,5e-6,5e-6`);
    rows.push(`${eps},1,5e-7,nan,5e-7,4e-7,5e-8,5e-8`);
  }
  return rows.join('\n') + '\n';
}

function constantsCsv(): string {
  return [
    'check,t,value',
    'decay_exponent_e,100.0,1.443',
    'n_weighted_sup_max_over_median,100.0,1.07',
    'partition_defect,0.0,0.0',
    'klainerman_sobolev,10.0,0.0594',
    'klainerman_sobolev,20.0,0.0569',
    'klainerman_sobolev,40.0,0.0565',
    'conformal_C,80.0,1.73',
    'kubota_max,100.0,0.145',
    'georgiev_ratio,30.0,0.017',
  ].join('\n') + '\n';
}

function identityCsv(allPass = true): string {
  return [
    'check_name,samples,max_residual,scale,pass',
    `scaling_t,1000,1e-13,100.0,True`,
    `null_flat_main,1000,2e-14,10.0,${allPass ? 'True' : 'False'}`,
  ].join('\n') + '\n';
}

function fixtureRun(): string {
  const dir = tmp();
  writeFileSync(join(dir, 'decay.csv'), decayCsv());
  writeFileSync(join(dir, 'growth.csv'), growthCsv());
  writeFileSync(join(dir, 'growth_series.csv'), growthSeriesCsv());
  writeFileSync(join(dir, 'picard.csv'), picardCsv());
  writeFileSync(join(dir, 'constants.csv'), constantsCsv());
  writeFileSync(join(dir, 'identity_report.csv'), identityCsv());
  writeManifest(dir, 'inequalities', { 'decay.csv': 82 });
  return dir;
}

test('csv parsing and filtering', () => {
  const t = parseCsv('a,b\n1,2\n3,4\n');
  assert.deepEqual(t.header, ['a', 'b']);
  assert.equal(t.rows.length, 2);
  assert.equal(where(t, 'a', '3').rows.length, 1);
});

test('schema drift raises a column-mismatch error', () => {
  const dir = tmp();
  writeFileSync(join(dir, 'decay.csv'), 't,component,value\n1,e,2\n');
  assert.throws(() => readCsv(join(dir, 'decay.csv'), ['t', 'component', 'weight_kind', 'weighted_sup']), ColumnMismatchError);
});

test('run directories without a manifest are refused', () => {
  const dir = tmp();
  writeFileSync(join(dir, 'decay.csv'), decayCsv());
  assert.throws(() => loadRun(dir), /no manifest/);
});

test('decay figure carries the -3/2 reference slope', () => {
  const svg = decayFigure(parseCsv(decayCsv()));
  assert.match(svg, /reference t\^\(-3\/2\)/);
  assert.match(svg, /polyline/);
});

test('growth figure overlays the log fit for logarithmic rows', () => {
  const svg = growthFigure(parseCsv(growthSeriesCsv()), parseCsv(growthCsv()), 'flat');
  assert.match(svg, /\(du\)\^2 fit/);
});

test('checks agree with the CSV-level criteria', () => {
  const checks = evaluateChecks({
    identity: parseCsv(identityCsv()),
    decay: parseCsv(decayCsv()),
    constants: parseCsv(constantsCsv()),
    growth: parseCsv(growthCsv()),
    picard: parseCsv(picardCsv()),
  });
  const byName = new Map(checks.map((c) => [c.name, c]));
  assert.equal(byName.get('algebraic identity suite')?.status, 'pass');
  assert.equal(byName.get('sup|E| decay exponent')?.status, 'pass');
  assert.equal(byName.get('(du)^2 logarithmic in both foliations')?.status, 'pass');
  assert.equal(
    byName.get('literal du*dv logarithmic (expected to fail: convergent by Huygens)')?.status,
    'expected-fail',
  );
  assert.equal(byName.get('all measured contraction ratios <= 1/2')?.status, 'pass');
  assert.equal(byName.get('rho(eps) nonincreasing as eps decreases')?.status, 'pass');
  // sections absent from the run read "not run"
  const empty = evaluateChecks({});
  assert.ok(empty.every((c) => c.status === 'not run'));
});

test('failing identities are reported as fail', () => {
  const checks = evaluateChecks({ identity: parseCsv(identityCsv(false)) });
  assert.equal(checks.find((c) => c.section === 'identities')?.status, 'fail');
});

test('render end to end, idempotent', () => {
  const run = fixtureRun();
  const out1 = tmp();
  const out2 = tmp();
  const files1 = render({ inputs: [run], out: out1, figures: ['decay', 'picard', 'growth'] });
  const files2 = render({ inputs: [run], out: out2, figures: ['decay', 'picard', 'growth'] });
  assert.deepEqual(files1, files2);
  assert.ok(files1.includes('summary.html'));
  for (const f of files1) {
    assert.equal(readFileSync(join(out1, f), 'utf8'), readFileSync(join(out2, f), 'utf8'));
  }
  const html = readFileSync(join(out1, 'summary.html'), 'utf8');
  assert.match(html, /PASS/);
  assert.match(html, /georgiev derivative tier truncated/);
  assert.match(html, /not run/i); // energies section missing from the fixture
});

test('argument parsing', () => {
  const args = parseArgs(['render', '--in', 'a', '--in', 'b', '--out', 'o', '--figures', 'decay']);
  assert.deepEqual(args.inputs, ['a', 'b']);
  assert.deepEqual(args.figures, ['decay']);
  assert.throws(() => parseArgs(['paint']), /unknown command/);
  assert.throws(() => parseArgs(['render', '--in', 'a', '--figures', 'pie']), /unknown figure kind/);
  assert.throws(() => parseArgs(['render']), /--in DIR is required/);
});
