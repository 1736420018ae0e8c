/** Documented CSV schemas of the kspin experiment outputs. */

export const SCHEMAS: Record<string, string[]> = {
  level_stats: ['L', 'k', 'realization', 'mean_r', 'status'],
  spacing_hist: ['L', 'k', 's_lo', 's_hi', 'density', 'surmise'],
  spectrum_scan: [
    'L',
    'k',
    'realization',
    'sigma',
    'level_index',
    'energy',
    'entropy_norm',
    'envelope',
    'outlier',
  ],
  gap_scaling: ['L', 'k', 'sigma', 'sigma_c', 'delta_mean', 'delta_sem'],
  critical_band: [
    'L',
    'k',
    'realization',
    'sigma_c_emp',
    'sigma_2',
    'sigma_3',
    'status',
  ],
};

/** Reference mean gap ratios drawn as horizontal guides on level-stats plots. */
export const REFERENCE_MEAN_R: Array<{ label: string; value: number }> = [
  { label: 'Poisson', value: 0.386 },
  { label: 'GOE', value: 0.53 },
  { label: 'GUE', value: 0.6 },
  { label: 'GSE', value: 0.67 },
];

export class SchemaError extends Error {}

export function checkHeader(experiment: string, header: string[]): void {
  const expected = SCHEMAS[experiment];
  if (!expected) {
    throw new SchemaError(`unknown experiment '${experiment}'`);
  }
  if (
    header.length !== expected.length ||
    expected.some((name, i) => header[i] !== name)
  ) {
    throw new SchemaError(
      `header mismatch for ${experiment}: got [${header.join(',')}], ` +
        `expected [${expected.join(',')}]`,
    );
  }
}
