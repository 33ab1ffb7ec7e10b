// Figure builders: each consumes the merged run tables and emits one SVG.

import { numericColumn, where, Table } from './csv.js';
import { linePlot, Series } from './svg.js';

export const FIGURE_KINDS = ['energies', 'decay', 'picard', 'growth'] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export function energiesFigure(energies: Table): string {
  const series: Series[] = [];
  for (const comp of uniq(energies, 'component')) {
    const byComp = where(energies, 'component', comp);
    for (const kind of uniq(byComp, 'kind')) {
      if (!['natural', 'ghost_direct', 'ghost_mass_acc', 'ghost_good_acc'].includes(kind)) continue;
      if (kind === 'natural') continue; // identical to ghost_direct in the plots
      const rows = where(byComp, 'kind', kind);
      series.push({
        label: `${comp}: ${kind}`,
        x: numericColumn(rows, 't'),
        y: numericColumn(rows, 'value'),
      });
    }
  }
  return linePlot({
    title: 'Energy histories',
    xLabel: 't',
    yLabel: 'energy',
    series,
  });
}

export function decayFigure(decay: Table): string {
  const series: Series[] = [];
  const plain = where(where(decay, 'component', 'e'), 'weight_kind', '1');
  const t = numericColumn(plain, 't').filter((v) => v > 0);
  const y = numericColumn(plain, 'weighted_sup');
  series.push({ label: 'sup|E|(t)', x: numericColumn(plain, 't'), y });
  // reference slope -3/2 through the last fitted point
  const sel = numericColumn(plain, 't')
    .map((tv, i) => [tv, y[i]] as const)
    .filter(([tv, yv]) => tv >= 10 && yv > 0);
  if (sel.length > 0) {
    const [tAnchor, yAnchor] = sel[sel.length - 1];
    const xs = sel.map(([tv]) => tv);
    series.push({
      label: 'reference t^(-3/2)',
      x: xs,
      y: xs.map((tv) => yAnchor * Math.pow(tv / tAnchor, -1.5)),
      dashed: true,
      color: '#57606a',
    });
  }
  const nRows = where(decay, 'component', 'n');
  for (const kind of uniq(nRows, 'weight_kind')) {
    const rows = where(nRows, 'weight_kind', kind);
    series.push({
      label: `n: ${kind} sup`,
      x: numericColumn(rows, 't'),
      y: numericColumn(rows, 'weighted_sup'),
    });
  }
  return linePlot({
    title: 'Pointwise decay (log-log) with the -3/2 reference slope',
    xLabel: 't',
    yLabel: 'weighted sup',
    logX: true,
    logY: true,
    series,
  });
}

export function picardFigure(picard: Table): string {
  const epsVals = uniq(picard, 'eps').map(Number).sort((a, b) => a - b);
  const rho: number[] = [];
  for (const e of epsVals) {
    const rows = where(picard, 'eps', fmtEps(picard, e));
    const ratios = numericColumn(rows, 'rho_k').filter((v) => Number.isFinite(v));
    rho.push(ratios.length ? Math.max(...ratios) : NaN);
  }
  const series: Series[] = [
    { label: 'worst contraction ratio', x: epsVals, y: rho },
    {
      label: 'rho = 1/2 target',
      x: epsVals,
      y: epsVals.map(() => 0.5),
      dashed: true,
      color: '#d1242f',
    },
  ];
  return linePlot({
    title: 'Contraction ratio vs data size',
    xLabel: 'eps',
    yLabel: 'max rho_k',
    logX: true,
    logY: true,
    series,
  });
}

export function growthFigure(growthSeries: Table, growth: Table, foliation: string): string {
  const series: Series[] = [];
  const byFol = where(growthSeries, 'foliation', foliation);
  const summaryByFol = where(growth, 'foliation', foliation);
  for (const q of uniq(byFol, 'Q')) {
    const rows = where(byFol, 'Q', q);
    series.push({
      label: q,
      x: numericColumn(rows, 't_or_s'),
      y: numericColumn(rows, 'integral'),
    });
    // c0 + c1 log x overlay for the logarithmic classifications
    const summary = where(summaryByFol, 'Q', q);
    if (summary.rows.length === 1 && summary.rows[0][10] === 'logarithmic') {
      const c0 = Number(summary.rows[0][4]);
      const c1 = Number(summary.rows[0][5]);
      const xs = numericColumn(rows, 't_or_s').filter((v) => v > 0);
      series.push({
        label: `${q} fit`,
        x: xs,
        y: xs.map((x) => c0 + c1 * Math.log(x)),
        dashed: true,
      });
    }
  }
  return linePlot({
    title: `Nonlinearity integral growth (${foliation} foliation)`,
    xLabel: foliation === 'flat' ? 't' : 's',
    yLabel: 'integral',
    logX: true,
    series,
  });
}

function uniq(table: Table, col: string): string[] {
  const i = table.header.indexOf(col);
  const seen: string[] = [];
  for (const row of table.rows) {
    if (!seen.includes(row[i])) seen.push(row[i]);
  }
  return seen;
}

function fmtEps(picard: Table, eps: number): string {
  const i = picard.header.indexOf('eps');
  for (const row of picard.rows) {
    if (Number(row[i]) === eps) return row[i];
  }
  return String(eps);
}
