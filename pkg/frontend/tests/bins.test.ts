import { describe, expect, it } from "vitest";

import {
  binIndex,
  colorFor,
  divergingScale,
  fixedPer10kScale,
  legendEntries,
  quantileScale,
} from "../src/bins.js";
import { layerPoints, layerScale, layerValues } from "../src/map.js";
import { lauraGeojson } from "./helpers.js";
import type { FeatureCollection } from "../src/types.js";

describe("quantile scale", () => {
  it("produces ascending edges covering the data", () => {
    const values = Array.from({ length: 100 }, (_, i) => i + 1);
    const scale = quantileScale(values);
    expect(scale.edges[0]).toBe(1);
    expect(scale.edges[scale.edges.length - 1]).toBe(100);
    for (let i = 1; i < scale.edges.length; i++) {
      expect(scale.edges[i]).toBeGreaterThan(scale.edges[i - 1]);
    }
    expect(scale.colors.length).toBe(scale.edges.length - 1);
  });

  it("collapses an all-equal layer into a single lowest bin", () => {
    const scale = quantileScale([0, 0, 0, 0]);
    expect(scale.colors).toHaveLength(1);
    expect(binIndex(scale, 0)).toBe(0);
  });

  it("merges duplicate quantile edges from heavy ties", () => {
    const scale = quantileScale([0, 0, 0, 0, 0, 0, 0, 0, 0, 7]);
    for (let i = 1; i < scale.edges.length; i++) {
      expect(scale.edges[i]).toBeGreaterThan(scale.edges[i - 1]);
    }
    expect(binIndex(scale, 0)).toBe(0);
    expect(binIndex(scale, 7)).toBe(scale.colors.length - 1);
  });
});

describe("fixed per-10k scale", () => {
  it("spans 0..10 regardless of the data", () => {
    const scale = fixedPer10kScale();
    expect(scale.edges[0]).toBe(0);
    expect(scale.edges[scale.edges.length - 1]).toBe(10);
    expect(scale.colors).toHaveLength(5);
  });

  it("clamps values above 10 into the top bin", () => {
    const scale = fixedPer10kScale();
    expect(binIndex(scale, 22.1)).toBe(4);
    expect(binIndex(scale, 0)).toBe(0);
    expect(binIndex(scale, 10)).toBe(4);
    expect(binIndex(scale, 2)).toBe(0);
    expect(binIndex(scale, 2.001)).toBe(1);
  });
});

describe("layer assembly", () => {
  const view = { width: 640, height: 560, pad: 24 };

  it("uses the fixed scale only for per-10k", () => {
    const fc = lauraGeojson();
    expect(layerScale(fc, "importations_per10k").edges).toEqual([0, 2, 4, 6, 8, 10]);
    const imp = layerScale(fc, "importations");
    expect(imp.edges[0]).toBeCloseTo(Math.min(...layerValues(fc, "importations")), 9);
  });

  it("puts every county of an all-zero result in the lowest bin", () => {
    const fc = lauraGeojson();
    const zero: FeatureCollection = {
      type: "FeatureCollection",
      features: fc.features.map((f) => ({
        ...f,
        properties: { ...f.properties, exportations_mid: 0 },
      })),
    };
    const scale = layerScale(zero, "exportations");
    const points = layerPoints(zero, "exportations", scale, view);
    expect(new Set(points.map((p) => p.color)).size).toBe(1);
    expect(points.every((p) => p.color === scale.colors[0])).toBe(true);
  });

  it("projects every point inside the padded viewport", () => {
    const fc = lauraGeojson();
    const scale = layerScale(fc, "importations");
    for (const p of layerPoints(fc, "importations", scale, view)) {
      expect(p.x).toBeGreaterThanOrEqual(view.pad);
      expect(p.x).toBeLessThanOrEqual(view.width - view.pad);
      expect(p.y).toBeGreaterThanOrEqual(view.pad);
      expect(p.y).toBeLessThanOrEqual(view.height - view.pad);
    }
  });

  it("assigns northernmost counties the smallest y", () => {
    const fc = lauraGeojson();
    const scale = layerScale(fc, "importations");
    const points = layerPoints(fc, "importations", scale, view);
    const lats = fc.features.map((f) => f.geometry.coordinates[1]);
    const north = points[lats.indexOf(Math.max(...lats))];
    const south = points[lats.indexOf(Math.min(...lats))];
    expect(north.y).toBeLessThan(south.y);
  });
});

describe("legend and diverging scale", () => {
  it("emits one labelled chip per bin", () => {
    const entries = legendEntries(fixedPer10kScale());
    expect(entries).toHaveLength(5);
    expect(entries[0].label).toContain("0");
    expect(entries[4].label).toContain("10");
  });

  it("centers the diverging scale on zero", () => {
    const scale = divergingScale(50);
    expect(colorFor(scale, 0)).toBe(scale.colors[2]);
    expect(colorFor(scale, 49)).toBe(scale.colors[4]);
    expect(colorFor(scale, -49)).toBe(scale.colors[0]);
  });
});
