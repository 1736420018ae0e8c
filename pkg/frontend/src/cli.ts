#!/usr/bin/env node
/** figures <experiment> --in DIR --out FILE [--no-references] [--no-envelope] */

import { writeFileSync } from 'fs';
import { join } from 'path';
import { Row, loadCsv } from './csv.js';
import {
  FigureOptions,
  criticalBandFigure,
  gapCollapseFigure,
  levelStatsFigure,
  spacingFigure,
  spectrumScanFigure,
} from './figures.js';
import { SchemaError } from './schema.js';

const RENDERERS: Record<
  string,
  { csv: string; render: (rows: Row[], options: FigureOptions) => string }
> = {
  'level-stats': { csv: 'level_stats', render: levelStatsFigure },
  spacing: { csv: 'spacing_hist', render: (rows) => spacingFigure(rows) },
  'spectrum-scan': { csv: 'spectrum_scan', render: spectrumScanFigure },
  'gap-scaling': { csv: 'gap_scaling', render: (rows) => gapCollapseFigure(rows) },
  'critical-band': { csv: 'critical_band', render: (rows) => criticalBandFigure(rows) },
};

/** One figure request: which experiment, where its CSV lives, where to write. */
export interface FigureSpec {
  experiment: string;
  inputDir: string;
  outputFile: string;
  options: FigureOptions;
}

/** Render a figure spec to its output file; throws SchemaError on bad input. */
export function render(figure: FigureSpec): void {
  const renderer = RENDERERS[figure.experiment];
  if (!renderer) {
    throw new SchemaError(`unknown experiment '${figure.experiment}'`);
  }
  const rows = loadCsv(join(figure.inputDir, `${renderer.csv}.csv`), renderer.csv);
  writeFileSync(figure.outputFile, renderer.render(rows, figure.options));
}

export function main(argv: string[]): number {
  const [experiment, ...rest] = argv;
  if (!experiment || !(experiment in RENDERERS)) {
    console.error(
      `usage: figures <${Object.keys(RENDERERS).join('|')}> --in DIR --out FILE`,
    );
    return 2;
  }
  let inDir = '';
  let outFile = '';
  const options: FigureOptions = {};
  for (let i = 0; i < rest.length; i++) {
    switch (rest[i]) {
      case '--in':
        inDir = rest[++i] ?? '';
        break;
      case '--out':
        outFile = rest[++i] ?? '';
        break;
      case '--no-references':
        options.referenceLines = false;
        break;
      case '--no-envelope':
        options.envelope = false;
        break;
      default:
        console.error(`unknown argument ${rest[i]}`);
        return 2;
    }
  }
  if (!inDir || !outFile) {
    console.error('both --in DIR and --out FILE are required');
    return 2;
  }
  try {
    render({ experiment, inputDir: inDir, outputFile: outFile, options });
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`figures: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${outFile}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith('cli.js')) {
  process.exit(main(process.argv.slice(2)));
}
