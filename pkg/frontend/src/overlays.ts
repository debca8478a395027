/** Stability arrows and roughness coloring. */

export interface Arrow {
  item: number;
  /** data-space displacement coords[slice+1][item] - coords[slice][item] */
  delta: number[];
  from: number[];
  to: number[];
}

/**
 * Displacement arrows at a slice: one per item, pointing at the item's
 * position in the next slice.  Items that do not move get no arrow.
 */
export function stabilityArrows(coords: number[][][], slice: number): Arrow[] {
  if (slice < 0 || slice >= coords.length - 1) return [];
  const arrows: Arrow[] = [];
  const here = coords[slice];
  const next = coords[slice + 1];
  for (let i = 0; i < here.length; i++) {
    const delta = here[i].map((v, k) => next[i][k] - v);
    if (delta.every((v) => v === 0)) continue;
    arrows.push({ item: i, delta, from: here[i], to: next[i] });
  }
  return arrows;
}

/**
 * Color scale for per-curve roughness: a linear ramp from light gray
 * (minimum roughness, i.e. straightest curve) to dark red (maximum).
 */
export function roughnessColor(value: number, min: number, max: number): string {
  const t = max > min ? (value - min) / (max - min) : 0;
  const clamped = Math.min(Math.max(t, 0), 1);
  const gray = Math.round(210 - 160 * clamped);
  const red = Math.round(210 + 20 * clamped);
  return `rgb(${red}, ${gray}, ${gray})`;
}
