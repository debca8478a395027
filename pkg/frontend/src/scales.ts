/** Axis bounds and pixel scales.
 *
 * Bounds are computed over ALL slices, not per slice, so scrubbing keeps
 * a fixed frame of reference and motion across slices stays comparable.
 */

export interface Bounds {
  min: number[];
  max: number[];
}

/** Componentwise min/max over every slice and item. */
export function globalBounds(coords: number[][][]): Bounds {
  const dim = coords[0][0].length;
  const min = new Array<number>(dim).fill(Infinity);
  const max = new Array<number>(dim).fill(-Infinity);
  for (const slice of coords) {
    for (const row of slice) {
      for (let k = 0; k < dim; k++) {
        if (row[k] < min[k]) min[k] = row[k];
        if (row[k] > max[k]) max[k] = row[k];
      }
    }
  }
  return { min, max };
}

export type Scale = (value: number) => number;

/** Linear map [lo, hi] -> [pixelLo, pixelHi]; degenerate ranges map to the midpoint. */
export function linearScale(lo: number, hi: number, pixelLo: number, pixelHi: number): Scale {
  const span = hi - lo;
  if (span === 0) {
    const mid = (pixelLo + pixelHi) / 2;
    return () => mid;
  }
  const ratio = (pixelHi - pixelLo) / span;
  return (value: number) => pixelLo + (value - lo) * ratio;
}

/** Pad bounds by a fraction on both ends so markers are not clipped. */
export function padded(lo: number, hi: number, fraction = 0.05): [number, number] {
  const span = hi - lo || 1;
  return [lo - fraction * span, hi + fraction * span];
}
