// Minimal deterministic SVG line plots: linear or log axes, reference lines.

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
  dashed?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  logX?: boolean;
  logY?: boolean;
  series: Series[];
  width?: number;
  height?: number;
}

const PALETTE = ['#1f6feb', '#d1242f', '#1a7f37', '#9a6700', '#8250df', '#bf3989', '#57606a'];
const M = { left: 64, right: 16, top: 34, bottom: 42 };

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let p = Math.floor(Math.log10(lo)); p <= Math.ceil(Math.log10(hi)); p++) {
      const v = 10 ** p;
      if (v >= lo / 1.0001 && v <= hi * 1.0001) out.push(v);
    }
    return out.length >= 2 ? out : [lo, hi];
  }
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 8 ? 2 : 1;
  const out: number[] = [];
  for (let v = Math.ceil(lo / (step * mult)) * step * mult; v <= hi; v += step * mult) {
    out.push(Number(v.toPrecision(10)));
  }
  return out;
}

function fmtTick(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(6)));
  return v.toExponential(0).replace('+', '');
}

export function linePlot(spec: PlotSpec): string {
  const W = spec.width ?? 560;
  const H = spec.height ?? 360;
  const pts = spec.series.flatMap((s) =>
    s.x.map((x, i) => [x, s.y[i]] as const).filter(
      ([x, y]) =>
        Number.isFinite(x) && Number.isFinite(y) && (!spec.logX || x > 0) && (!spec.logY || y > 0),
    ),
  );
  if (pts.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}"><text x="20" y="30">${esc(spec.title)}: no data</text></svg>`;
  }
  let xLo = Math.min(...pts.map((p) => p[0]));
  let xHi = Math.max(...pts.map((p) => p[0]));
  let yLo = Math.min(...pts.map((p) => p[1]));
  let yHi = Math.max(...pts.map((p) => p[1]));
  if (xLo === xHi) [xLo, xHi] = [xLo - 1, xHi + 1];
  if (yLo === yHi) [yLo, yHi] = [yLo - Math.abs(yLo) * 0.5 - 1e-12, yHi + Math.abs(yHi) * 0.5 + 1e-12];
  if (!spec.logY) {
    const pad = 0.06 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;
  }

  const tx = (x: number) =>
    M.left +
    ((spec.logX ? Math.log(x / xLo) / Math.log(xHi / xLo) : (x - xLo) / (xHi - xLo)) *
      (W - M.left - M.right));
  const ty = (y: number) =>
    H - M.bottom -
    ((spec.logY ? Math.log(y / yLo) / Math.log(yHi / yLo) : (y - yLo) / (yHi - yLo)) *
      (H - M.top - M.bottom));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" font-family="Helvetica,Arial,sans-serif" font-size="11">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${M.left}" y="18" font-size="13" font-weight="bold">${esc(spec.title)}</text>`);

  for (const v of ticks(xLo, xHi, !!spec.logX)) {
    const x = tx(v);
    parts.push(
      `<line x1="${r2(x)}" y1="${M.top}" x2="${r2(x)}" y2="${H - M.bottom}" stroke="#eee"/>`,
      `<text x="${r2(x)}" y="${H - M.bottom + 14}" text-anchor="middle">${fmtTick(v)}</text>`,
    );
  }
  for (const v of ticks(yLo, yHi, !!spec.logY)) {
    const y = ty(v);
    parts.push(
      `<line x1="${M.left}" y1="${r2(y)}" x2="${W - M.right}" y2="${r2(y)}" stroke="#eee"/>`,
      `<text x="${M.left - 6}" y="${r2(y) + 3}" text-anchor="end">${fmtTick(v)}</text>`,
    );
  }
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${W - M.left - M.right}" height="${H - M.top - M.bottom}" fill="none" stroke="#444"/>`,
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 8}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
    `<text x="14" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" transform="rotate(-90 14 ${(M.top + H - M.bottom) / 2})">${esc(spec.yLabel)}</text>`,
  );

  spec.series.forEach((s, si) => {
    const color = s.color ?? PALETTE[si % PALETTE.length];
    const coords = s.x
      .map((x, i) => [x, s.y[i]] as const)
      .filter(
        ([x, y]) =>
          Number.isFinite(x) && Number.isFinite(y) && (!spec.logX || x > 0) && (!spec.logY || y > 0),
      )
      .map(([x, y]) => `${r2(tx(x))},${r2(ty(y))}`)
      .join(' ');
    const dash = s.dashed ? ' stroke-dasharray="6 4"' : '';
    parts.push(`<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`);
    const lx = W - M.right - 150;
    const ly = M.top + 14 + 14 * si;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"${dash}/>`,
      `<text x="${lx + 28}" y="${ly}">${esc(s.label)}</text>`,
    );
  });
  parts.push('</svg>');
  return parts.join('\n');
}

function r2(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

export function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}
