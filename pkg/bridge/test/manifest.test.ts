import { describe, expect, it } from 'vitest';
import { ManifestError, parseManifest } from '../src/manifest.js';

const GOOD =
  '{"class_id": 10, "name": "bucket", "prompt": "bucket, open-topped container", "n_samples": 500, "guidance_scale": 2.0, "generation_seed": 13}\n' +
  '{"class_id": 11, "name": "bus", "prompt": "bus, large road vehicle", "n_samples": 500, "guidance_scale": 2.0, "generation_seed": 14}\n';

describe('parseManifest', () => {
  it('parses the harness manifest format', () => {
    const records = parseManifest(GOOD);
    expect(records.length).toBe(2);
    expect(records[0]).toEqual({
      class_id: 10,
      name: 'bucket',
      prompt: 'bucket, open-topped container',
      n_samples: 500,
      guidance_scale: 2.0,
      generation_seed: 13,
    });
  });

  it('tolerates blank lines', () => {
    const records = parseManifest('\n' + GOOD + '\n\n');
    expect(records.length).toBe(2);
  });

  it('reports the line number for bad JSON', () => {
    expect(() => parseManifest(GOOD + 'not json\n', 'gen.jsonl')).toThrow(/gen\.jsonl:3/);
  });

  it('reports missing fields by name', () => {
    const line = '{"class_id": 1, "name": "x", "prompt": "x, y", "n_samples": 5, "guidance_scale": 2.0}\n';
    expect(() => parseManifest(line)).toThrow(/generation_seed/);
  });

  it('rejects non-integer ids and zero sample counts', () => {
    expect(() =>
      parseManifest('{"class_id": 1.5, "name": "x", "prompt": "p", "n_samples": 5, "guidance_scale": 2.0, "generation_seed": 1}\n'),
    ).toThrow(/class_id/);
    expect(() =>
      parseManifest('{"class_id": 1, "name": "x", "prompt": "p", "n_samples": 0, "guidance_scale": 2.0, "generation_seed": 1}\n'),
    ).toThrow(/n_samples/);
  });

  it('rejects an empty manifest', () => {
    expect(() => parseManifest('\n\n')).toThrow(ManifestError);
  });
});
