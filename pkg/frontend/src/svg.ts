/** Minimal SVG plotting helpers: linear scales, paths, axes, a color ramp. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function extent(values: number[], pad = 0.0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  const span = hi - lo || 1;
  return [lo - pad * span, hi + pad * span];
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const final = step * mult;
  const start = Math.ceil(lo / final) * final;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += final) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function fmt(value: number): string {
  if (value === 0) return '0';
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(1);
  return Number(value.toPrecision(4)).toString();
}

export function polyline(points: Array<[number, number]>): string {
  return points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(' ');
}

/** Dark-blue -> teal -> yellow ramp for normalized entropy in [0, 1]. */
export function entropyColor(t: number): string {
  const stops: Array<[number, [number, number, number]]> = [
    [0.0, [68, 1, 84]],
    [0.35, [49, 104, 142]],
    [0.7, [53, 183, 121]],
    [1.0, [253, 231, 37]],
  ];
  const clamped = Math.min(1, Math.max(0, t));
  for (let i = 1; i < stops.length; i++) {
    const [t1, c1] = stops[i];
    const [t0, c0] = stops[i - 1];
    if (clamped <= t1) {
      const u = (clamped - t0) / (t1 - t0);
      const mix = c0.map((a, j) => Math.round(a + u * (c1[j] - a)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  return 'rgb(253,231,37)';
}

export const SERIES_COLORS = [
  '#1f77b4',
  '#d62728',
  '#2ca02c',
  '#9467bd',
  '#ff7f0e',
  '#8c564b',
  '#17becf',
  '#7f7f7f',
];

export interface Frame {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  x: Scale;
  y: Scale;
}

export function makeFrame(
  xDomain: [number, number],
  yDomain: [number, number],
  width = 640,
  height = 420,
): Frame {
  const margin = { top: 28, right: 24, bottom: 46, left: 64 };
  return {
    width,
    height,
    margin,
    x: linearScale(xDomain, [margin.left, width - margin.right]),
    y: linearScale(yDomain, [height - margin.bottom, margin.top]),
  };
}

export function axes(frame: Frame, xLabel: string, yLabel: string, title: string): string {
  const { x, y, width, height, margin } = frame;
  const parts: string[] = [];
  const [x0, x1] = x.domain;
  const [y0, y1] = y.domain;
  parts.push(
    `<line x1="${x.range[0]}" y1="${y.range[0]}" x2="${x.range[1]}" y2="${y.range[0]}" stroke="black"/>`,
    `<line x1="${x.range[0]}" y1="${y.range[0]}" x2="${x.range[0]}" y2="${y.range[1]}" stroke="black"/>`,
  );
  for (const t of ticks(x0, x1)) {
    const px = x(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${y.range[0]}" x2="${px.toFixed(2)}" y2="${(y.range[0] + 5).toFixed(2)}" stroke="black"/>`,
      `<text x="${px.toFixed(2)}" y="${(y.range[0] + 18).toFixed(2)}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(y0, y1)) {
    const py = y(t);
    parts.push(
      `<line x1="${(x.range[0] - 5).toFixed(2)}" y1="${py.toFixed(2)}" x2="${x.range[0]}" y2="${py.toFixed(2)}" stroke="black"/>`,
      `<text x="${(x.range[0] - 8).toFixed(2)}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(width / 2).toFixed(2)}" y="${(height - 8).toFixed(2)}" text-anchor="middle" font-size="13">${xLabel}</text>`,
    `<text transform="translate(14,${(height / 2).toFixed(2)}) rotate(-90)" text-anchor="middle" font-size="13">${yLabel}</text>`,
    `<text x="${(width / 2).toFixed(2)}" y="${(margin.top - 10).toFixed(2)}" text-anchor="middle" font-size="14">${title}</text>`,
  );
  return parts.join('\n');
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}
