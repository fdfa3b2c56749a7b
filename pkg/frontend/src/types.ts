// Wire types mirroring the /v1 API documents.

export interface Interval {
  low: number;
  mid: number;
  high: number;
}

export type Quantity =
  | "evac_rate"
  | "evacuees"
  | "exportations"
  | "receptions"
  | "importations"
  | "importations_per10k";

export const QUANTITIES: readonly Quantity[] = [
  "evac_rate",
  "evacuees",
  "exportations",
  "receptions",
  "importations",
  "importations_per10k",
];

export interface DetectionRates {
  low: number;
  mid: number;
  high: number;
}

export interface PrevalenceDoc {
  source: "computed" | "precomputed";
  as_of?: string;
  window_days?: number;
  path?: string;
  detection?: DetectionRates;
}

export interface SplitDoc {
  friends: number;
  hotel: number;
}

export interface ScenarioDoc {
  name: string;
  category: number;
  warned: string[];
  mandatory: string[];
  voluntary: string[];
  split: SplitDoc;
  prevalence: PrevalenceDoc;
  mc_samples: number;
  seed: number;
}

export type JobStatus = "pending" | "running" | "done" | "failed";

export interface JobRecord {
  id: string;
  status: JobStatus;
  scenario_name?: string;
  created_at?: string;
  updated_at?: string;
  error?: { code: string; message: string; detail?: unknown } | null;
}

export interface CountyOutcomeDoc {
  fips: string;
  name: string;
  district_id: string;
  population: number;
  evac_rate: Interval;
  evacuees: Interval;
  exportations: Interval;
  receptions: Interval;
  importations: Interval;
  importations_per10k: Interval;
}

export interface DistrictOutcomeDoc {
  district_id: string;
  n_counties: number;
  population: number;
  evac_rate: Interval;
  evacuees: Interval;
  exportations: Interval;
  receptions: Interval;
  importations: Interval;
  importations_per10k: Interval;
}

export interface ResultDoc {
  schema_version: number;
  scenario: string;
  seed: number;
  mc_samples: number;
  point_rates: boolean;
  level: number;
  warnings: string[];
  counties: CountyOutcomeDoc[];
  districts: DistrictOutcomeDoc[];
  totals: Record<string, Interval>;
}

export interface PointFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: Record<string, string | number>;
}

export interface FeatureCollection {
  type: "FeatureCollection";
  features: PointFeature[];
}

export interface DatasetsSummary {
  counties: number;
  block_groups: number;
  districts: number;
  cases: { counties: number; first_date: string | null; last_date: string | null };
  quality_warnings: string[];
}
