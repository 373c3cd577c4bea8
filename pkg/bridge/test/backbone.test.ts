import { describe, expect, it } from 'vitest';
import {
  BackboneSpec,
  boxResample,
  extractFeature,
  mulberry32,
  projectionMatrix,
} from '../src/backbone.js';
import { RgbImage } from '../src/ppm.js';

function solid(width: number, height: number, rgb: [number, number, number]): RgbImage {
  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0; i < pixels.length; i += 3) {
    pixels[i] = rgb[0];
    pixels[i + 1] = rgb[1];
    pixels[i + 2] = rgb[2];
  }
  return { width, height, pixels };
}

describe('boxResample', () => {
  it('matches a hand-computed 4x2 -> 2x1 average', () => {
    // left bin averages columns 0-1, right bin columns 2-3, both rows
    const pixels = new Uint8Array([
      // row 0: R ramps 0,40,80,120
      0, 0, 0, 40, 0, 0, 80, 0, 0, 120, 0, 0,
      // row 1: R ramps 200,240, 0, 40
      200, 0, 0, 240, 0, 0, 0, 0, 0, 40, 0, 0,
    ]);
    const out = boxResample({ width: 4, height: 2, pixels }, 1);
    // single bin: mean of all eight red values / 255
    const expected = (0 + 40 + 80 + 120 + 200 + 240 + 0 + 40) / 8 / 255;
    expect(out.length).toBe(3);
    expect(out[0]).toBeCloseTo(expected, 12);
    expect(out[1]).toBe(0);
    expect(out[2]).toBe(0);
  });

  it('keeps a solid image solid at any target size', () => {
    const out = boxResample(solid(13, 9, [51, 102, 204]), 4);
    for (let i = 0; i < out.length; i += 3) {
      expect(out[i]).toBeCloseTo(51 / 255, 12);
      expect(out[i + 1]).toBeCloseTo(102 / 255, 12);
      expect(out[i + 2]).toBeCloseTo(204 / 255, 12);
    }
  });

  it('upsamples small images without dropping pixels', () => {
    const out = boxResample(solid(2, 2, [255, 0, 0]), 8);
    expect(out.length).toBe(8 * 8 * 3);
    expect(out[0]).toBe(1);
  });
});

describe('mulberry32', () => {
  it('is deterministic per seed', () => {
    const a = mulberry32(42);
    const b = mulberry32(42);
    for (let i = 0; i < 100; i++) expect(a()).toBe(b());
  });

  it('yields values in [0, 1)', () => {
    const r = mulberry32(7);
    for (let i = 0; i < 1000; i++) {
      const v = r();
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(1);
    }
  });
});

describe('projectionMatrix', () => {
  const spec: BackboneSpec = { id: 'test-backbone', resize: 4, dim: 8 };

  it('has the right shape and roughly unit row norms', () => {
    const m = projectionMatrix(spec);
    const inputLen = 4 * 4 * 3;
    expect(m.length).toBe(8 * inputLen);
    for (let row = 0; row < 8; row++) {
      let norm = 0;
      for (let col = 0; col < inputLen; col++) {
        norm += m[row * inputLen + col] ** 2;
      }
      // entries are N(0, 1/inputLen) so row norm concentrates near 1
      expect(norm).toBeGreaterThan(0.4);
      expect(norm).toBeLessThan(2.5);
    }
  });

  it('changes entirely when the id changes', () => {
    const a = projectionMatrix(spec);
    const b = projectionMatrix({ ...spec, id: 'other-backbone' });
    expect(a[0]).not.toBe(b[0]);
  });
});

describe('extractFeature', () => {
  const spec: BackboneSpec = { id: 'test-backbone', resize: 8, dim: 16 };

  it('is bit-stable across repeated calls', () => {
    const image = solid(20, 14, [10, 200, 90]);
    const a = extractFeature(image, spec);
    const b = extractFeature(image, spec);
    expect(a.length).toBe(16);
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(true);
  });

  it('separates different images', () => {
    const a = extractFeature(solid(10, 10, [255, 0, 0]), spec);
    const b = extractFeature(solid(10, 10, [0, 0, 255]), spec);
    let diff = 0;
    for (let i = 0; i < a.length; i++) diff += Math.abs(a[i] - b[i]);
    expect(diff).toBeGreaterThan(0.01);
  });

  it('is insensitive to image resolution for solid colors', () => {
    // box averaging a constant image gives the same resampled vector
    const a = extractFeature(solid(64, 64, [77, 140, 20]), spec);
    const b = extractFeature(solid(9, 17, [77, 140, 20]), spec);
    for (let i = 0; i < a.length; i++) {
      expect(Math.abs(a[i] - b[i])).toBeLessThan(1e-6);
    }
  });
});
