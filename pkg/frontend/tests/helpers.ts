import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FeatureCollection, ResultDoc } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export const FIXTURES = join(HERE, "fixtures");
export const REPO_ROOT = join(HERE, "..", "..");

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

export function lauraResultText(): string {
  return fixtureText("laura_result.json");
}

export function lauraResult(): ResultDoc {
  return JSON.parse(lauraResultText()) as ResultDoc;
}

export function lauraGeojson(): FeatureCollection {
  return JSON.parse(fixtureText("laura_result.geojson")) as FeatureCollection;
}

export function lauraSummaryText(): string {
  return fixtureText("laura_summary.json");
}
