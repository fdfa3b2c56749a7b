// Color binning for map layers: quantile bins per layer, except the
// per-10k layers which sit on a fixed 0..10 scale so runs stay comparable.

export interface ColorScale {
  /** ascending, length colors.length + 1 */
  edges: number[];
  colors: string[];
}

const SEQUENTIAL = ["#fee5d9", "#fcae91", "#fb6a4a", "#de2d26", "#a50f15"];
const DIVERGING = ["#0571b0", "#92c5de", "#f7f7f7", "#f4a582", "#ca0020"];

function quantile(sorted: number[], p: number): number {
  // nearest-rank on the sorted sample
  const rank = Math.max(1, Math.ceil(p * sorted.length));
  return sorted[rank - 1];
}

export function quantileScale(values: number[], bins = 5): ColorScale {
  if (values.length === 0) {
    return { edges: [0, 0], colors: [SEQUENTIAL[0]] };
  }
  const sorted = [...values].sort((a, b) => a - b);
  const edges = [sorted[0]];
  for (let j = 1; j < bins; j++) {
    const e = quantile(sorted, j / bins);
    if (e > edges[edges.length - 1]) edges.push(e);
  }
  const top = sorted[sorted.length - 1];
  if (top > edges[edges.length - 1]) edges.push(top);
  if (edges.length === 1) edges.push(edges[0]);
  const n = edges.length - 1;
  const colors = Array.from({ length: n }, (_, i) =>
    SEQUENTIAL[n === 1 ? 0 : Math.round((i * (SEQUENTIAL.length - 1)) / (n - 1))],
  );
  return { edges, colors };
}

export function fixedPer10kScale(): ColorScale {
  return { edges: [0, 2, 4, 6, 8, 10], colors: [...SEQUENTIAL] };
}

export function divergingScale(maxAbs: number): ColorScale {
  const m = maxAbs > 0 ? maxAbs : 1;
  return { edges: [-m, -m / 2, -m / 10, m / 10, m / 2, m], colors: [...DIVERGING] };
}

/** Bin index for a value; out-of-range values clamp into the end bins. */
export function binIndex(scale: ColorScale, value: number): number {
  const n = scale.colors.length;
  if (value <= scale.edges[0]) return 0;
  for (let i = 1; i < scale.edges.length; i++) {
    if (value <= scale.edges[i]) return Math.min(i - 1, n - 1);
  }
  return n - 1;
}

export function colorFor(scale: ColorScale, value: number): string {
  return scale.colors[binIndex(scale, value)];
}

function short(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  return String(Number(x.toPrecision(4)));
}

export function legendEntries(scale: ColorScale): { label: string; color: string }[] {
  return scale.colors.map((color, i) => ({
    color,
    label: `${short(scale.edges[i])} – ${short(scale.edges[i + 1])}`,
  }));
}
