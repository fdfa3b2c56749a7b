import { describe, expect, it } from "vitest";

import { extractRawTotals, scanJson } from "../src/rawjson.js";
import { lauraResultText, lauraSummaryText } from "./helpers.js";

describe("scanJson", () => {
  it("reports every primitive with its path", () => {
    const seen: Array<[string, string]> = [];
    scanJson('{"a": [1, {"b": true}], "c": null}', (path, raw) => {
      seen.push([path.join("."), raw]);
    });
    expect(seen).toEqual([
      ["a.0", "1"],
      ["a.1.b", "true"],
      ["c", "null"],
    ]);
  });

  it("handles escaped quotes inside strings", () => {
    const seen: string[] = [];
    scanJson('{"k\\"ey": "va\\\\l\\"ue"}', (_, raw) => seen.push(raw));
    expect(seen).toEqual(['"va\\\\l\\"ue"']);
  });

  it("rejects trailing garbage and truncation", () => {
    expect(() => scanJson("{} x", () => {})).toThrow(SyntaxError);
    expect(() => scanJson('{"a": ', () => {})).toThrow(SyntaxError);
    expect(() => scanJson('{"a" 1}', () => {})).toThrow(SyntaxError);
  });
});

describe("extractRawTotals", () => {
  it("returns literals byte-identical to the document text", () => {
    const text = lauraResultText();
    const totals = extractRawTotals(text);
    expect(Object.keys(totals).sort()).toEqual([
      "evacuees",
      "exportations",
      "importations",
      "receptions",
    ]);
    for (const bounds of Object.values(totals)) {
      for (const raw of [bounds.low, bounds.mid, bounds.high]) {
        expect(text).toContain(raw);
        expect(Number.isFinite(Number(raw))).toBe(true);
      }
    }
  });

  it("preserves spellings that JSON.parse round-trips would change", () => {
    // whole-number floats serialize with a trailing .0 server-side
    const text = '{"totals": {"x": {"low": 1e-07, "mid": 2.5E+1, "high": 500000.0}}}';
    const totals = extractRawTotals(text);
    expect(totals.x.low).toBe("1e-07");
    expect(totals.x.mid).toBe("2.5E+1");
    expect(totals.x.high).toBe("500000.0");
    // the naive path really does lose the original bytes
    expect(String(JSON.parse("1e-07"))).toBe("1e-7");
    expect(String(JSON.parse("2.5E+1"))).toBe("25");
    expect(String(JSON.parse("500000.0"))).toBe("500000");
  });

  it("agrees between the result document and the summary artifact", () => {
    const fromResult = extractRawTotals(lauraResultText());
    const fromSummary = extractRawTotals(lauraSummaryText());
    expect(fromResult).toEqual(fromSummary);
  });

  it("rejects documents without totals or with partial intervals", () => {
    expect(() => extractRawTotals('{"a": 1}')).toThrow(/no totals/);
    expect(() => extractRawTotals('{"totals": {"x": {"low": 1, "mid": 2}}}')).toThrow(
      /missing high/,
    );
  });

  it("ignores totals-shaped objects that are not at the top level", () => {
    const text =
      '{"nested": {"totals": {"x": {"low": 1, "mid": 2, "high": 3}}}, ' +
      '"totals": {"y": {"low": 4, "mid": 5, "high": 6}}}';
    const totals = extractRawTotals(text);
    expect(Object.keys(totals)).toEqual(["y"]);
  });
});
