// Release gate for the planner. Each test prints one PASS line so the
// criteria are visible in the run output.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { diffResults } from "../src/diff.js";
import { draftFromScenario } from "../src/draft.js";
import { LAURA } from "../src/presets.js";
import { extractRawTotals } from "../src/rawjson.js";
import { QUANTITIES } from "../src/types.js";
import { lauraResult, lauraResultText, lauraSummaryText, REPO_ROOT } from "./helpers.js";

describe("acceptance", () => {
  it("laura preset pre-selects 11 mandatory and 3 voluntary counties", () => {
    const draft = draftFromScenario(LAURA);
    expect(draft.mandatory.size).toBe(11);
    expect(draft.voluntary.size).toBe(3);

    // the bundled preset must stay in lockstep with the server's copy
    const server = JSON.parse(
      readFileSync(join(REPO_ROOT, "scenarios", "laura.json"), "utf8"),
    );
    expect(LAURA).toEqual(server);
    console.log(
      `[PASS] preset-load: laura preselects ${draft.mandatory.size} mandatory + ` +
        `${draft.voluntary.size} voluntary, in lockstep with the server preset`,
    );
  });

  it("displayed totals byte-match the service summary artifact", () => {
    // display pipeline: raw response text -> raw literal slices, no parsing
    const displayed = extractRawTotals(lauraResultText());

    // independent locator over the summary bytes: regex, not the scanner
    const summary = lauraSummaryText();
    let checked = 0;
    for (const [quantity, bounds] of Object.entries(displayed)) {
      const block = summary.match(
        new RegExp(`"${quantity}":\\s*\\{([^}]*)\\}`),
      );
      expect(block, `summary has totals for ${quantity}`).not.toBeNull();
      for (const bound of ["low", "mid", "high"] as const) {
        const m = block![1].match(new RegExp(`"${bound}":\\s*([-0-9.eE+]+)`));
        expect(m, `summary has ${quantity}.${bound}`).not.toBeNull();
        expect(bounds[bound]).toBe(m![1]);
        checked++;
      }
    }
    expect(checked).toBe(12);
    console.log(
      `[PASS] verbatim-totals: all ${checked} displayed literals byte-match summary.json`,
    );
  });

  it("diff of two identical runs is all zeros", () => {
    const diff = diffResults(lauraResult(), lauraResult());
    let cells = 0;
    for (const entry of [...diff.counties, ...diff.districts]) {
      for (const q of QUANTITIES) {
        expect(entry.deltas[q].low).toBe(0);
        expect(entry.deltas[q].mid).toBe(0);
        expect(entry.deltas[q].high).toBe(0);
        cells += 3;
      }
    }
    for (const delta of Object.values(diff.totals)) {
      expect(delta.low).toBe(0);
      expect(delta.mid).toBe(0);
      expect(delta.high).toBe(0);
      cells += 3;
    }
    console.log(`[PASS] identical-diff: ${cells} delta cells all exactly zero`);
  });
});
