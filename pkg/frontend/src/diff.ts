// Two-scenario comparison: per-county, per-district, and total deltas
// (B minus A), computed on mids and both interval ends.

import type { Interval, Quantity, ResultDoc } from "./types.js";
import { QUANTITIES } from "./types.js";

export interface IntervalDelta {
  low: number;
  mid: number;
  high: number;
}

export interface DiffEntry {
  id: string;
  name: string;
  deltas: Record<Quantity, IntervalDelta>;
}

export interface ResultDiff {
  counties: DiffEntry[];
  districts: DiffEntry[];
  totals: Record<string, IntervalDelta>;
}

function deltaOf(a: Interval, b: Interval): IntervalDelta {
  return { low: b.low - a.low, mid: b.mid - a.mid, high: b.high - a.high };
}

function indexBy<T>(items: T[], key: (t: T) => string): Map<string, T> {
  return new Map(items.map((t) => [key(t), t]));
}

export function diffResults(a: ResultDoc, b: ResultDoc): ResultDiff {
  const countiesB = indexBy(b.counties, (c) => c.fips);
  const districtsB = indexBy(b.districts, (d) => d.district_id);

  if (
    a.counties.length !== b.counties.length ||
    a.counties.some((c) => !countiesB.has(c.fips))
  ) {
    throw new Error("results cover different county universes");
  }
  if (
    a.districts.length !== b.districts.length ||
    a.districts.some((d) => !districtsB.has(d.district_id))
  ) {
    throw new Error("results cover different district universes");
  }

  const counties = a.counties.map((ca) => {
    const cb = countiesB.get(ca.fips)!;
    const deltas = {} as Record<Quantity, IntervalDelta>;
    for (const q of QUANTITIES) deltas[q] = deltaOf(ca[q], cb[q]);
    return { id: ca.fips, name: ca.name, deltas };
  });

  const districts = a.districts.map((da) => {
    const db = districtsB.get(da.district_id)!;
    const deltas = {} as Record<Quantity, IntervalDelta>;
    for (const q of QUANTITIES) deltas[q] = deltaOf(da[q], db[q]);
    return { id: da.district_id, name: da.district_id, deltas };
  });

  const totals: Record<string, IntervalDelta> = {};
  for (const key of Object.keys(a.totals)) {
    if (!(key in b.totals)) {
      throw new Error(`results disagree on totals: missing ${key}`);
    }
    totals[key] = deltaOf(a.totals[key], b.totals[key]);
  }

  return { counties, districts, totals };
}

export function maxAbsDelta(diff: ResultDiff, quantity: Quantity): number {
  let m = 0;
  for (const entry of [...diff.counties, ...diff.districts]) {
    m = Math.max(m, Math.abs(entry.deltas[quantity].mid));
  }
  return m;
}
