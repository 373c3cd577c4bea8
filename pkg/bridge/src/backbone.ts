/**
 * Deterministic embedding backbone.
 *
 * A real deployment would put a pretrained vision model here. This stand-in
 * keeps the same interface (image in, fixed-width float32 feature out) while
 * being fully deterministic and dependency-free: images are box-resampled to
 * a small square, flattened, and pushed through a frozen random projection
 * derived from the backbone identifier. Identical inputs always produce
 * identical bytes, which is what the downstream container contract needs.
 */

import { RgbImage } from './ppm.js';

export interface BackboneSpec {
  /** seeds the projection; change it and every feature changes */
  id: string;
  /** square side length images are resampled to before projection */
  resize: number;
  /** output feature width */
  dim: number;
}

export const DEFAULT_BACKBONE: BackboneSpec = {
  id: 'seeded-projection-v1',
  resize: 32,
  dim: 64,
};

export function fnv1a32(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/** Small fast 32-bit PRNG, good enough for frozen projection weights. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Average-pool an RGB image onto a target x target grid.
 *
 * Bin edges are proportional and rounded down, so every source pixel lands
 * in exactly one bin and re-running is bit-stable. No normative filter is
 * required here; box averaging is the simplest order-independent choice.
 */
export function boxResample(image: RgbImage, target: number): Float64Array {
  const { width, height, pixels } = image;
  if (target < 1) throw new Error(`bad resize target ${target}`);
  const out = new Float64Array(target * target * 3);
  for (let ty = 0; ty < target; ty++) {
    const y0 = Math.floor((ty * height) / target);
    const y1 = Math.max(y0 + 1, Math.floor(((ty + 1) * height) / target));
    for (let tx = 0; tx < target; tx++) {
      const x0 = Math.floor((tx * width) / target);
      const x1 = Math.max(x0 + 1, Math.floor(((tx + 1) * width) / target));
      let r = 0;
      let g = 0;
      let b = 0;
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          const p = (y * width + x) * 3;
          r += pixels[p];
          g += pixels[p + 1];
          b += pixels[p + 2];
        }
      }
      const n = (y1 - y0) * (x1 - x0);
      const o = (ty * target + tx) * 3;
      out[o] = r / n / 255;
      out[o + 1] = g / n / 255;
      out[o + 2] = b / n / 255;
    }
  }
  return out;
}

const matrixCache = new Map<string, Float64Array>();

/**
 * Frozen N(0, 1/inputLen) projection matrix for a backbone spec, row-major
 * dim x inputLen. Cached per process; regenerating gives the same values.
 */
export function projectionMatrix(spec: BackboneSpec): Float64Array {
  const inputLen = spec.resize * spec.resize * 3;
  const key = `${spec.id}:${spec.dim}:${inputLen}`;
  const hit = matrixCache.get(key);
  if (hit) return hit;

  const rand = mulberry32(fnv1a32(key));
  const scale = 1 / Math.sqrt(inputLen);
  const m = new Float64Array(spec.dim * inputLen);
  // Box-Muller, two entries per draw pair
  for (let i = 0; i < m.length; i += 2) {
    const u1 = rand() || 1e-12;
    const u2 = rand();
    const r = Math.sqrt(-2 * Math.log(u1));
    m[i] = r * Math.cos(2 * Math.PI * u2) * scale;
    if (i + 1 < m.length) m[i + 1] = r * Math.sin(2 * Math.PI * u2) * scale;
  }
  matrixCache.set(key, m);
  return m;
}

export function extractFeature(image: RgbImage, spec: BackboneSpec): Float32Array {
  const x = boxResample(image, spec.resize);
  const m = projectionMatrix(spec);
  const inputLen = x.length;
  const out = new Float32Array(spec.dim);
  for (let row = 0; row < spec.dim; row++) {
    let acc = 0;
    const base = row * inputLen;
    for (let col = 0; col < inputLen; col++) {
      acc += m[base + col] * x[col];
    }
    out[row] = Math.fround(acc);
  }
  return out;
}
