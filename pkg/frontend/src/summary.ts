// Single-page HTML summary: pass/fail per check with the measured numbers,
// figure gallery, and the run manifests.

import { CheckResult } from './checks.js';
import { Manifest } from './run.js';
import { esc } from './svg.js';

const BADGE: Record<CheckResult['status'], string> = {
  pass: '#1a7f37',
  fail: '#d1242f',
  'expected-fail': '#9a6700',
  'not run': '#57606a',
};

export function summaryHtml(
  checks: CheckResult[],
  figures: string[],
  manifests: Manifest[],
): string {
  const bySection = new Map<string, CheckResult[]>();
  for (const c of checks) {
    const list = bySection.get(c.section) ?? [];
    list.push(c);
    bySection.set(c.section, list);
  }
  const rows = [...bySection.entries()]
    .map(([section, list]) => {
      const body = list
        .map(
          (c) => `
      <tr>
        <td>${esc(c.name)}</td>
        <td><span style="color:${BADGE[c.status]};font-weight:bold">${c.status.toUpperCase()}</span></td>
        <td>${esc(c.detail)}</td>
      </tr>`,
        )
        .join('');
      return `<h3>${esc(section)}</h3>
    <table border="0" cellpadding="4" style="border-collapse:collapse">
      <tr style="text-align:left"><th>check</th><th>status</th><th>measured</th></tr>${body}
    </table>`;
    })
    .join('\n');

  const gallery = figures
    .map((f) => `<div style="margin:12px 0"><img src="${esc(f)}" alt="${esc(f)}"/></div>`)
    .join('\n');

  const deviations = manifests.flatMap((m) => m.deviations);
  const devBlock = deviations.length
    ? `<h3>recorded deviations</h3><ul>${deviations.map((d) => `<li>${esc(d)}</li>`).join('')}</ul>`
    : '';

  const manifestRows = manifests
    .map(
      (m) =>
        `<tr><td>${esc(m.subcommand)}</td><td><code>${esc(m.config_hash)}</code></td><td>${esc(
          m.code_version,
        )}</td><td>${m.seed}</td></tr>`,
    )
    .join('');

  return `<!doctype html>
<html><head><meta charset="utf-8"><title>kgzlab run summary</title></head>
<body style="font-family:Helvetica,Arial,sans-serif;max-width:960px;margin:24px auto">
<h1>Klein-Gordon-Zakharov laboratory: run summary</h1>
${rows}
${devBlock}
<h3>figures</h3>
${gallery}
<h3>runs</h3>
<table border="0" cellpadding="4">
<tr style="text-align:left"><th>subcommand</th><th>config</th><th>version</th><th>seed</th></tr>
${manifestRows}
</table>
</body></html>
`;
}
