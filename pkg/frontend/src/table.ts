// District/county table rows and sorting.

import type { DistrictOutcomeDoc, Quantity, ResultDoc } from "./types.js";
import { QUANTITIES } from "./types.js";

export interface DistrictRow {
  district: string;
  counties: number;
  population: number;
  evac_rate: number;
  evacuees: number;
  exportations: number;
  receptions: number;
  importations: number;
  importations_per10k: number;
}

export type SortKey = keyof DistrictRow;

export function districtRows(result: ResultDoc): DistrictRow[] {
  return result.districts.map((d: DistrictOutcomeDoc) => {
    const row = {
      district: d.district_id,
      counties: d.n_counties,
      population: d.population,
    } as DistrictRow;
    for (const q of QUANTITIES) row[q as Quantity] = d[q].mid;
    return row;
  });
}

export function sortRows(
  rows: DistrictRow[],
  key: SortKey,
  direction: "asc" | "desc",
): DistrictRow[] {
  const sign = direction === "asc" ? 1 : -1;
  return [...rows].sort((a, b) => {
    const va = a[key];
    const vb = b[key];
    const cmp =
      typeof va === "number" && typeof vb === "number"
        ? va - vb
        : String(va).localeCompare(String(vb));
    // district name breaks ties so the order is total
    return cmp !== 0 ? sign * cmp : a.district.localeCompare(b.district);
  });
}
