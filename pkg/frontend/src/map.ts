// County point layer: equirectangular fit of centroid points into a
// viewport, colored by the selected quantity's mid value.

import type { ColorScale } from "./bins.js";
import { colorFor, fixedPer10kScale, quantileScale } from "./bins.js";
import type { FeatureCollection, Quantity } from "./types.js";

export interface MapPoint {
  fips: string;
  name: string;
  district: string;
  x: number;
  y: number;
  value: number;
  color: string;
}

export interface Viewport {
  width: number;
  height: number;
  pad: number;
}

export function makeProjection(
  fc: FeatureCollection,
  view: Viewport,
): (lon: number, lat: number) => [number, number] {
  let minLon = Infinity;
  let maxLon = -Infinity;
  let minLat = Infinity;
  let maxLat = -Infinity;
  for (const f of fc.features) {
    const [lon, lat] = f.geometry.coordinates;
    minLon = Math.min(minLon, lon);
    maxLon = Math.max(maxLon, lon);
    minLat = Math.min(minLat, lat);
    maxLat = Math.max(maxLat, lat);
  }
  const spanLon = maxLon - minLon || 1;
  const spanLat = maxLat - minLat || 1;
  const innerW = view.width - 2 * view.pad;
  const innerH = view.height - 2 * view.pad;
  const scale = Math.min(innerW / spanLon, innerH / spanLat);
  const offX = view.pad + (innerW - spanLon * scale) / 2;
  const offY = view.pad + (innerH - spanLat * scale) / 2;
  return (lon, lat) => [
    offX + (lon - minLon) * scale,
    // latitude grows north, screen y grows down
    offY + (maxLat - lat) * scale,
  ];
}

export function layerValues(fc: FeatureCollection, quantity: Quantity): number[] {
  return fc.features.map((f) => Number(f.properties[`${quantity}_mid`] ?? 0));
}

export function layerScale(fc: FeatureCollection, quantity: Quantity): ColorScale {
  if (quantity === "importations_per10k") return fixedPer10kScale();
  return quantileScale(layerValues(fc, quantity));
}

export function layerPoints(
  fc: FeatureCollection,
  quantity: Quantity,
  scale: ColorScale,
  view: Viewport,
): MapPoint[] {
  const proj = makeProjection(fc, view);
  return fc.features.map((f) => {
    const [lon, lat] = f.geometry.coordinates;
    const [x, y] = proj(lon, lat);
    const value = Number(f.properties[`${quantity}_mid`] ?? 0);
    return {
      fips: String(f.properties.fips),
      name: String(f.properties.name),
      district: String(f.properties.district_id),
      x,
      y,
      value,
      color: colorFor(scale, value),
    };
  });
}
