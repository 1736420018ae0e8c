/** Renderers for the five figure kinds, all pure string -> SVG functions. */

import { Row, num, okRows } from './csv.js';
import { REFERENCE_MEAN_R, SchemaError } from './schema.js';
import {
  SERIES_COLORS,
  axes,
  entropyColor,
  extent,
  makeFrame,
  polyline,
  svgDocument,
} from './svg.js';

export interface FigureOptions {
  referenceLines?: boolean;
  envelope?: boolean;
}

function groupBy<T>(rows: Row[], key: (row: Row) => T): Map<T, Row[]> {
  const out = new Map<T, Row[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}

function meanAndSem(values: number[]): [number, number] {
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  if (values.length < 2) return [mean, 0];
  const variance =
    values.reduce((a, b) => a + (b - mean) ** 2, 0) / (values.length - 1);
  return [mean, Math.sqrt(variance / values.length)];
}

/** Mean gap ratio per (L, k) with standard errors and RMT reference lines. */
export function levelStatsFigure(rows: Row[], options: FigureOptions = {}): string {
  const usable = okRows(rows, 'mean_r');
  if (usable.length === 0) throw new SchemaError('no usable level-stats rows');
  const cells = groupBy(usable, (r) => `${r.L}|${r.k}`);
  const sizes = [...new Set(usable.map((r) => Number(r.L)))].sort((a, b) => a - b);
  const ks = usable.map((r) => Number(r.k));
  const frame = makeFrame(extent(ks, 0.15), [0.3, 0.75]);
  const body: string[] = [];
  if (options.referenceLines !== false) {
    for (const ref of REFERENCE_MEAN_R) {
      const py = frame.y(ref.value);
      body.push(
        `<line class="reference" x1="${frame.x.range[0]}" y1="${py.toFixed(2)}" ` +
          `x2="${frame.x.range[1]}" y2="${py.toFixed(2)}" stroke="gray" ` +
          `stroke-dasharray="6,4"/>`,
        `<text x="${frame.x.range[1] - 4}" y="${(py - 4).toFixed(2)}" text-anchor="end" ` +
          `font-size="11" fill="gray">${ref.label} ${ref.value}</text>`,
      );
    }
  }
  for (const [cell, cellRows] of cells) {
    const [L, k] = cell.split('|').map(Number);
    const color = SERIES_COLORS[sizes.indexOf(L) % SERIES_COLORS.length];
    const offset = (sizes.indexOf(L) - (sizes.length - 1) / 2) * 0.08;
    const [mean, sem] = meanAndSem(cellRows.map((r) => num(r, 'mean_r')));
    const px = frame.x(k + offset);
    body.push(
      `<line x1="${px.toFixed(2)}" y1="${frame.y(mean - sem).toFixed(2)}" ` +
        `x2="${px.toFixed(2)}" y2="${frame.y(mean + sem).toFixed(2)}" stroke="${color}"/>`,
      `<circle class="cell" cx="${px.toFixed(2)}" cy="${frame.y(mean).toFixed(2)}" r="4" fill="${color}"/>`,
    );
  }
  sizes.forEach((L, i) => {
    body.push(
      `<text x="${frame.x.range[0] + 8 + 64 * i}" y="${frame.margin.top + 6}" ` +
        `font-size="12" fill="${SERIES_COLORS[i % SERIES_COLORS.length]}">L=${L}</text>`,
    );
  });
  body.push(axes(frame, 'locality k', 'mean gap ratio', 'Average level statistics'));
  return svgDocument(frame.width, frame.height, body.join('\n'));
}

/** Unfolded spacing histograms with the matching surmise curve, one facet per (L,k). */
export function spacingFigure(rows: Row[]): string {
  if (rows.length === 0) throw new SchemaError('no spacing rows');
  const cells = [...groupBy(rows, (r) => `${r.L}|${r.k}`).entries()];
  const facetHeight = 230;
  const width = 640;
  const parts: string[] = [];
  cells.forEach(([cell, cellRows], index) => {
    const [L, k] = cell.split('|').map(Number);
    const top = index * facetHeight;
    const densities = cellRows.map((r) => num(r, 'density'));
    const surmises = cellRows.map((r) => num(r, 'surmise'));
    const frame = makeFrame(
      [num(cellRows[0], 's_lo'), num(cellRows[cellRows.length - 1], 's_hi')],
      [0, Math.max(...densities, ...surmises) * 1.1 || 1],
      width,
      facetHeight,
    );
    const bars = cellRows
      .map((row) => {
        const x0 = frame.x(num(row, 's_lo'));
        const x1 = frame.x(num(row, 's_hi'));
        const y = frame.y(num(row, 'density'));
        return (
          `<rect class="bar" x="${x0.toFixed(2)}" y="${y.toFixed(2)}" ` +
          `width="${(x1 - x0).toFixed(2)}" height="${(frame.y(0) - y).toFixed(2)}" ` +
          `fill="#9ecae1" stroke="#6baed6"/>`
        );
      })
      .join('\n');
    const curve = polyline(
      cellRows.map((row) => [
        frame.x((num(row, 's_lo') + num(row, 's_hi')) / 2),
        frame.y(num(row, 'surmise')),
      ]),
    );
    parts.push(
      `<g transform="translate(0,${top})">`,
      bars,
      `<polyline class="surmise" points="${curve}" fill="none" stroke="#d62728" stroke-width="2"/>`,
      axes(frame, 'normalized spacing s', 'p(s)', `L=${L}, k=${k}`),
      `</g>`,
    );
  });
  return svgDocument(width, facetHeight * cells.length, parts.join('\n'));
}

/** Spectrum vs disorder, points colored by S/S_Page, with envelope and outlier. */
export function spectrumScanFigure(rows: Row[], options: FigureOptions = {}): string {
  if (rows.length === 0) throw new SchemaError('no spectrum rows');
  const cells = [...groupBy(rows, (r) => `${r.L}|${r.k}`).entries()];
  const facetHeight = 420;
  const width = 640;
  const parts: string[] = [];
  cells.forEach(([cell, cellRows], index) => {
    const [L, k] = cell.split('|').map(Number);
    const top = index * facetHeight;
    const sigmas = cellRows.map((r) => num(r, 'sigma'));
    const energies = cellRows.map((r) => num(r, 'energy'));
    const frame = makeFrame(extent(sigmas, 0.03), extent(energies, 0.05), width, facetHeight);
    const points = cellRows
      .map((row) => {
        const color = entropyColor(num(row, 'entropy_norm'));
        return (
          `<circle cx="${frame.x(num(row, 'sigma')).toFixed(1)}" ` +
          `cy="${frame.y(num(row, 'energy')).toFixed(1)}" r="1.2" fill="${color}"/>`
        );
      })
      .join('\n');
    parts.push(`<g transform="translate(0,${top})">`, points);
    const bySigma = [...groupBy(cellRows, (r) => num(r, 'sigma')).entries()].sort(
      (a, b) => a[0] - b[0],
    );
    if (options.envelope !== false) {
      for (const sign of [1, -1]) {
        const curve = polyline(
          bySigma.map(([sigma, rs]) => [
            frame.x(sigma),
            frame.y(sign * num(rs[0], 'envelope')),
          ]),
        );
        parts.push(
          `<polyline class="envelope" points="${curve}" fill="none" ` +
            `stroke="#e377c2" stroke-width="1.5" stroke-dasharray="8,4"/>`,
        );
      }
    }
    const outlier = polyline(
      bySigma.map(([sigma, rs]) => [frame.x(sigma), frame.y(num(rs[0], 'outlier'))]),
    );
    parts.push(
      `<polyline class="outlier" points="${outlier}" fill="none" stroke="#d62728" ` +
        `stroke-width="1.5" stroke-dasharray="2,3"/>`,
      axes(frame, 'disorder strength sigma', 'energy', `Spectrum vs disorder (L=${L}, k=${k})`),
      `</g>`,
    );
  });
  return svgDocument(width, facetHeight * cells.length, parts.join('\n'));
}

/** Gap collapse: delta/L against (sigma_c - sigma)^2, one series per L. */
export function gapCollapseFigure(rows: Row[]): string {
  if (rows.length === 0) throw new SchemaError('no gap-scaling rows');
  const series = [...groupBy(rows, (r) => Number(r.L)).entries()].sort(
    (a, b) => a[0] - b[0],
  );
  const xs = rows.map((r) => (num(r, 'sigma_c') - num(r, 'sigma')) ** 2);
  const ys = rows.map((r) => num(r, 'delta_mean') / Number(r.L));
  const frame = makeFrame(extent(xs, 0.05), extent([0, ...ys], 0.05));
  const body: string[] = [];
  series.forEach(([L, seriesRows], index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const points = seriesRows
      .map((row): [number, number] => [
        (num(row, 'sigma_c') - num(row, 'sigma')) ** 2,
        num(row, 'delta_mean') / L,
      ])
      .sort((a, b) => a[0] - b[0]);
    body.push(
      `<polyline class="series" points="${polyline(
        points.map(([x, y]) => [frame.x(x), frame.y(y)]),
      )}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
    for (const [x, y] of points) {
      body.push(
        `<circle cx="${frame.x(x).toFixed(2)}" cy="${frame.y(y).toFixed(2)}" r="3" fill="${color}"/>`,
      );
    }
    body.push(
      `<text x="${frame.x.range[0] + 8 + 64 * index}" y="${frame.margin.top + 6}" ` +
        `font-size="12" fill="${color}">L=${L}</text>`,
    );
  });
  body.push(
    axes(frame, '(sigma_c - sigma)^2', 'gap / L', 'Gap scaling collapse'),
  );
  return svgDocument(frame.width, frame.height, body.join('\n'));
}

/** Empirical critical disorder vs L with the analytic [sigma_2, sigma_3] band. */
export function criticalBandFigure(rows: Row[]): string {
  const usable = okRows(rows, 'sigma_c_emp');
  if (usable.length === 0) throw new SchemaError('no usable critical-band rows');
  const byL = [...groupBy(usable, (r) => Number(r.L)).entries()].sort(
    (a, b) => a[0] - b[0],
  );
  const sizes = byL.map(([L]) => L);
  const everything = usable.flatMap((r) => [
    num(r, 'sigma_c_emp'),
    num(r, 'sigma_2'),
    num(r, 'sigma_3'),
  ]);
  const frame = makeFrame(extent(sizes, 0.1), extent([0, ...everything], 0.08));
  const body: string[] = [];
  const upper = byL.map(([L, rs]): [number, number] => [
    frame.x(L),
    frame.y(Math.max(num(rs[0], 'sigma_2'), num(rs[0], 'sigma_3'))),
  ]);
  const lower = byL.map(([L, rs]): [number, number] => [
    frame.x(L),
    frame.y(Math.min(num(rs[0], 'sigma_2'), num(rs[0], 'sigma_3'))),
  ]);
  body.push(
    `<polygon class="band" points="${polyline([...upper, ...lower.reverse()])}" ` +
      `fill="#c6dbef" stroke="#6baed6" stroke-dasharray="5,3" fill-opacity="0.7"/>`,
  );
  for (const [L, cellRows] of byL) {
    const values = cellRows.map((r) => num(r, 'sigma_c_emp'));
    const mean = values.reduce((a, b) => a + b, 0) / values.length;
    const std =
      values.length > 1
        ? Math.sqrt(
            values.reduce((a, b) => a + (b - mean) ** 2, 0) / (values.length - 1),
          )
        : 0;
    const px = frame.x(L);
    body.push(
      `<line x1="${px.toFixed(2)}" y1="${frame.y(mean - std).toFixed(2)}" ` +
        `x2="${px.toFixed(2)}" y2="${frame.y(mean + std).toFixed(2)}" stroke="#d62728"/>`,
      `<circle class="empirical" cx="${px.toFixed(2)}" cy="${frame.y(mean).toFixed(2)}" ` +
        `r="4" fill="#d62728"/>`,
    );
  }
  body.push(
    axes(frame, 'system size L', 'critical disorder', 'Empirical merge vs analytic band'),
  );
  return svgDocument(frame.width, frame.height, body.join('\n'));
}
