// Editable scenario state. Order status lives in two disjoint sets; the
// click cycle (none -> voluntary -> mandatory -> none) is the only mutation
// path for county status, so the sets can never overlap.

import type { DetectionRates, ScenarioDoc } from "./types.js";

export type OrderStatus = "none" | "voluntary" | "mandatory";

export interface ScenarioDraft {
  name: string;
  category: number;
  mandatory: Set<string>;
  voluntary: Set<string>;
  /** warned counties that carry no order; preserved across edits */
  extraWarned: Set<string>;
  friendsShare: number;
  prevalenceSource: "computed" | "precomputed";
  asOf: string;
  windowDays: number;
  detection: DetectionRates | null;
  mcSamples: number;
  seed: number;
  selected: string | null;
  dirty: boolean;
}

export const DEFAULT_DETECTION: DetectionRates = { low: 1 / 3, mid: 1 / 5, high: 1 / 10 };

export function blankDraft(asOf: string): ScenarioDraft {
  return {
    name: "untitled",
    category: 3,
    mandatory: new Set(),
    voluntary: new Set(),
    extraWarned: new Set(),
    friendsShare: 0.6,
    prevalenceSource: "computed",
    asOf,
    windowDays: 10,
    detection: null,
    mcSamples: 2000,
    seed: 1,
    selected: null,
    dirty: false,
  };
}

export function orderStatus(draft: ScenarioDraft, fips: string): OrderStatus {
  if (draft.mandatory.has(fips)) return "mandatory";
  if (draft.voluntary.has(fips)) return "voluntary";
  return "none";
}

export function cycleCounty(draft: ScenarioDraft, fips: string): ScenarioDraft {
  const mandatory = new Set(draft.mandatory);
  const voluntary = new Set(draft.voluntary);
  switch (orderStatus(draft, fips)) {
    case "none":
      voluntary.add(fips);
      break;
    case "voluntary":
      voluntary.delete(fips);
      mandatory.add(fips);
      break;
    case "mandatory":
      mandatory.delete(fips);
      break;
  }
  return { ...draft, mandatory, voluntary, selected: fips, dirty: true };
}

export function setCategory(draft: ScenarioDraft, category: number): ScenarioDraft {
  const clamped = Math.min(5, Math.max(0, Math.round(category)));
  return { ...draft, category: clamped, dirty: true };
}

export function setFriendsShare(draft: ScenarioDraft, share: number): ScenarioDraft {
  const clamped = Math.min(1, Math.max(0, share));
  return { ...draft, friendsShare: clamped, dirty: true };
}

export function setDetection(draft: ScenarioDraft, detection: DetectionRates | null): ScenarioDraft {
  return { ...draft, detection, dirty: true };
}

export function validateDraft(draft: ScenarioDraft): string[] {
  const problems: string[] = [];
  for (const fips of draft.mandatory) {
    if (draft.voluntary.has(fips)) {
      problems.push(`county ${fips} is both mandatory and voluntary`);
    }
  }
  if (!Number.isInteger(draft.category) || draft.category < 0 || draft.category > 5) {
    problems.push(`category ${draft.category} outside 0..5`);
  }
  if (draft.friendsShare < 0 || draft.friendsShare > 1) {
    problems.push(`friends share ${draft.friendsShare} outside [0, 1]`);
  }
  if (draft.mcSamples < 1) {
    problems.push("mc_samples must be at least 1");
  }
  if (draft.detection) {
    const { low, mid, high } = draft.detection;
    if (!(high <= mid && mid <= low)) {
      problems.push("detection rates must satisfy high <= mid <= low");
    }
  }
  return problems;
}

export function draftToScenario(draft: ScenarioDraft): ScenarioDoc {
  const problems = validateDraft(draft);
  if (problems.length > 0) {
    throw new Error(`invalid scenario: ${problems.join("; ")}`);
  }
  const warned = new Set(draft.extraWarned);
  for (const f of draft.mandatory) warned.add(f);
  for (const f of draft.voluntary) warned.add(f);
  const doc: ScenarioDoc = {
    name: draft.name,
    category: draft.category,
    warned: [...warned].sort(),
    mandatory: [...draft.mandatory].sort(),
    voluntary: [...draft.voluntary].sort(),
    split: { friends: draft.friendsShare, hotel: 1 - draft.friendsShare },
    prevalence: {
      source: draft.prevalenceSource,
      as_of: draft.asOf,
      window_days: draft.windowDays,
    },
    mc_samples: draft.mcSamples,
    seed: draft.seed,
  };
  if (draft.detection) doc.prevalence.detection = draft.detection;
  return doc;
}

export function draftFromScenario(doc: ScenarioDoc): ScenarioDraft {
  const mandatory = new Set(doc.mandatory);
  const voluntary = new Set(doc.voluntary);
  const extraWarned = new Set(
    doc.warned.filter((f) => !mandatory.has(f) && !voluntary.has(f)),
  );
  return {
    name: doc.name,
    category: doc.category,
    mandatory,
    voluntary,
    extraWarned,
    friendsShare: doc.split.friends,
    prevalenceSource: doc.prevalence.source,
    asOf: doc.prevalence.as_of ?? "",
    windowDays: doc.prevalence.window_days ?? 10,
    detection: doc.prevalence.detection ?? null,
    mcSamples: doc.mc_samples,
    seed: doc.seed,
    selected: null,
    dirty: false,
  };
}
