// Bundled scenario presets, kept in lockstep with the server's scenario
// files (the test suite cross-checks them against scenarios/*.json).

import type { ScenarioDoc } from "./types.js";

export const LAURA: ScenarioDoc = {
  name: "laura",
  category: 4,
  warned: [
    "48039", "48071", "48167", "48199", "48201", "48241", "48245",
    "48291", "48351", "48361", "48403", "48405", "48419", "48457",
  ],
  mandatory: [
    "48071", "48199", "48241", "48245", "48291", "48351", "48361",
    "48403", "48405", "48419", "48457",
  ],
  voluntary: ["48039", "48167", "48201"],
  split: { friends: 0.6, hotel: 0.4 },
  prevalence: { source: "computed", as_of: "2020-08-26", window_days: 10 },
  mc_samples: 2000,
  seed: 20200827,
};

export const RITA_COUNTERFACTUAL: ScenarioDoc = {
  name: "rita_counterfactual",
  category: 5,
  warned: [
    "48039", "48071", "48167", "48199", "48201", "48241", "48245",
    "48291", "48351", "48361", "48403", "48405", "48419", "48457",
  ],
  mandatory: [
    "48039", "48071", "48167", "48199", "48201", "48241", "48245",
    "48291", "48351", "48361", "48403", "48405", "48419", "48457",
  ],
  voluntary: [],
  split: { friends: 0.6, hotel: 0.4 },
  prevalence: { source: "computed", as_of: "2020-08-26", window_days: 10 },
  mc_samples: 2000,
  seed: 20050924,
};

export const PRESETS: Record<string, ScenarioDoc> = {
  laura: LAURA,
  rita_counterfactual: RITA_COUNTERFACTUAL,
};
