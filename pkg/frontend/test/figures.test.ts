import { existsSync, mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { loadCsv } from '../src/csv.js';
import {
  criticalBandFigure,
  gapCollapseFigure,
  levelStatsFigure,
  spacingFigure,
  spectrumScanFigure,
} from '../src/figures.js';
import { SchemaError } from '../src/schema.js';
import { main } from '../src/cli.js';

const DATA = join(__dirname, 'data');

function golden(dir: string, file: string): string {
  return join(DATA, dir, file);
}

describe('csv loading', () => {
  it('loads a schema-conformant file', () => {
    const rows = loadCsv(golden('level_stats', 'level_stats.csv'), 'level_stats');
    expect(rows.length).toBe(16);
    expect(rows[0].status).toBe('ok');
  });

  it('rejects a corrupted header', () => {
    const text = readFileSync(golden('level_stats', 'level_stats.csv'), 'utf8');
    const corrupted = text.replace('mean_r', 'meanr');
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    writeFileSync(join(dir, 'level_stats.csv'), corrupted);
    expect(() => loadCsv(join(dir, 'level_stats.csv'), 'level_stats')).toThrow(
      SchemaError,
    );
  });

  it('rejects an empty file', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    writeFileSync(join(dir, 'level_stats.csv'), 'L,k,realization,mean_r,status\n');
    expect(() => loadCsv(join(dir, 'level_stats.csv'), 'level_stats')).toThrow(
      /no data rows/,
    );
  });
});

describe('renderers', () => {
  it('level stats: cells plus four reference lines', () => {
    const rows = loadCsv(golden('level_stats', 'level_stats.csv'), 'level_stats');
    const svg = levelStatsFigure(rows);
    expect(svg).toContain('<svg');
    expect((svg.match(/class="reference"/g) ?? []).length).toBe(4);
    expect((svg.match(/class="cell"/g) ?? []).length).toBe(4); // (L,k) cells
  });

  it('level stats: reference lines can be disabled', () => {
    const rows = loadCsv(golden('level_stats', 'level_stats.csv'), 'level_stats');
    const svg = levelStatsFigure(rows, { referenceLines: false });
    expect(svg).not.toContain('class="reference"');
  });

  it('spacing: bars plus a surmise overlay', () => {
    const rows = loadCsv(golden('spacing', 'spacing_hist.csv'), 'spacing_hist');
    const svg = spacingFigure(rows);
    expect((svg.match(/class="bar"/g) ?? []).length).toBe(50);
    expect(svg).toContain('class="surmise"');
  });

  it('spectrum scan: colored points, two envelopes, outlier curve', () => {
    const rows = loadCsv(golden('spectrum', 'spectrum_scan.csv'), 'spectrum_scan');
    const svg = spectrumScanFigure(rows);
    expect((svg.match(/class="envelope"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="outlier"/g) ?? []).length).toBe(1);
    expect((svg.match(/<circle/g) ?? []).length).toBe(448);
  });

  it('gap collapse superimposes the L=9,10,11 series on shared axes', () => {
    const rows = loadCsv(golden('gap', 'gap_scaling.csv'), 'gap_scaling');
    const svg = gapCollapseFigure(rows);
    expect((svg.match(/class="series"/g) ?? []).length).toBe(3);
    expect(svg).toContain('L=9');
    expect(svg).toContain('L=10');
    expect(svg).toContain('L=11');
    // collapse: with f(L)=L the per-L curves overlap, so their y-ranges agree
    const byL = new Map<number, number[]>();
    for (const row of rows) {
      const L = Number(row.L);
      const y = Number(row.delta_mean) / L;
      byL.set(L, [...(byL.get(L) ?? []), y]);
    }
    const maxima = [...byL.values()].map((ys) => Math.max(...ys));
    expect(Math.max(...maxima) / Math.min(...maxima)).toBeLessThan(1.25);
  });

  it('critical band: shaded band plus empirical markers', () => {
    const rows = loadCsv(golden('band', 'critical_band.csv'), 'critical_band');
    const svg = criticalBandFigure(rows);
    expect((svg.match(/class="band"/g) ?? []).length).toBe(1);
    expect((svg.match(/class="empirical"/g) ?? []).length).toBe(3);
  });
});

describe('cli', () => {
  it('renders a figure end to end', () => {
    const out = join(mkdtempSync(join(tmpdir(), 'figs-')), 'level.svg');
    const code = main(['level-stats', '--in', join(DATA, 'level_stats'), '--out', out]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, 'utf8')).toContain('</svg>');
  });

  it('fails with nonzero exit on schema-corrupted input and writes nothing', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    const text = readFileSync(golden('gap', 'gap_scaling.csv'), 'utf8');
    writeFileSync(join(dir, 'gap_scaling.csv'), text.replace('delta_mean', 'delta'));
    const out = join(dir, 'gap.svg');
    expect(main(['gap-scaling', '--in', dir, '--out', out])).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it('fails on empty data and missing files', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    writeFileSync(
      join(dir, 'critical_band.csv'),
      'L,k,realization,sigma_c_emp,sigma_2,sigma_3,status\n',
    );
    const out = join(dir, 'band.svg');
    expect(main(['critical-band', '--in', dir, '--out', out])).toBe(1);
    expect(existsSync(out)).toBe(false);
    expect(main(['spacing', '--in', dir, '--out', out])).toBe(1);
  });

  it('rejects unknown experiments and missing flags', () => {
    expect(main(['unknown', '--in', 'x', '--out', 'y'])).toBe(2);
    expect(main(['spacing'])).toBe(2);
  });
});
