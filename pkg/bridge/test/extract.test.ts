import { existsSync, mkdirSync, mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { fileURLToPath } from 'url';
import { describe, expect, it } from 'vitest';
import { parseCatalog } from '../src/catalog.js';
import { readContainer } from '../src/container.js';
import { extractEmbeddings } from '../src/extract.js';
import { encodePpm } from '../src/ppm.js';
import { stubImage } from '../src/generate.js';

const HERE = fileURLToPath(new URL('.', import.meta.url));
const FIXTURE_IMAGES = join(HERE, '..', 'fixtures', 'images');

const CATALOG = parseCatalog(
  ['apple\tfruit', 'badger\tmammal', 'bucket\tcontainer'].join('\n') + '\n',
);

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), 'bridge-extract-'));
}

function outPaths(dir: string) {
  return {
    data: join(dir, 'emb.fpeb'),
    meta: join(dir, 'emb.meta.jsonl'),
    summary: join(dir, 'emb.summary.json'),
  };
}

describe('extractEmbeddings on the shipped fixture', () => {
  it('produces one row per image with catalog ids', () => {
    const out = outPaths(tempDir());
    const summary = extractEmbeddings({
      imageRoot: FIXTURE_IMAGES,
      catalog: CATALOG,
      outputData: out.data,
      outputMetadata: out.meta,
      summaryPath: out.summary,
      backbone: { id: 'test-backbone', resize: 8, dim: 12 },
    });
    expect(summary.sample_count).toBe(3);
    expect(summary.class_counts).toEqual({ badger: 1, bucket: 2 });
    expect(summary.warning_count).toBe(0);

    const samples = readContainer(out.data, out.meta);
    // folders in sorted order: badger (id 1) then bucket (id 2)
    expect(samples.map(s => s.classId)).toEqual([1, 2, 2]);
    expect(samples[0].feature.length).toBe(12);
    expect(samples.every(s => s.origin === 'real' && s.split === 'train')).toBe(true);

    const onDisk = JSON.parse(readFileSync(out.summary, 'utf-8'));
    expect(onDisk.sample_count).toBe(3);
  });

  it('is byte-deterministic across runs', () => {
    const a = outPaths(tempDir());
    const b = outPaths(tempDir());
    for (const out of [a, b]) {
      extractEmbeddings({
        imageRoot: FIXTURE_IMAGES,
        catalog: CATALOG,
        outputData: out.data,
        outputMetadata: out.meta,
      });
    }
    expect(readFileSync(a.data).equals(readFileSync(b.data))).toBe(true);
    expect(readFileSync(a.meta).equals(readFileSync(b.meta))).toBe(true);
  });

  it('honors origin and split overrides', () => {
    const out = outPaths(tempDir());
    extractEmbeddings({
      imageRoot: FIXTURE_IMAGES,
      catalog: CATALOG,
      outputData: out.data,
      outputMetadata: out.meta,
      origin: 'synthetic',
      split: 'test',
    });
    const samples = readContainer(out.data, out.meta);
    expect(samples.every(s => s.origin === 'synthetic' && s.split === 'test')).toBe(true);
  });
});

describe('extractEmbeddings edge cases', () => {
  it('skips unknown class folders with a warning, not an abort', () => {
    const root = tempDir();
    mkdirSync(join(root, 'badger'));
    writeFileSync(
      join(root, 'badger', 'a.ppm'),
      encodePpm(stubImage({ class_id: 1, name: 'badger', prompt: 'p', n_samples: 1, guidance_scale: 2, generation_seed: 9 }, 0, 8)),
    );
    mkdirSync(join(root, 'zeppelin'));
    writeFileSync(join(root, 'zeppelin', 'a.ppm'), encodePpm(stubImage({ class_id: 2, name: 'z', prompt: 'p', n_samples: 1, guidance_scale: 2, generation_seed: 10 }, 0, 8)));

    const out = outPaths(tempDir());
    const summary = extractEmbeddings({
      imageRoot: root,
      catalog: CATALOG,
      outputData: out.data,
      outputMetadata: out.meta,
      summaryPath: out.summary,
    });
    expect(summary.sample_count).toBe(1);
    expect(summary.warning_count).toBe(1);
    expect(summary.skipped).toEqual([{ folder: 'zeppelin', reason: 'not in catalog' }]);
  });

  it('fails on an image root with no usable images and writes nothing', () => {
    const root = tempDir();
    mkdirSync(join(root, 'zeppelin'));
    const out = outPaths(tempDir());
    expect(() =>
      extractEmbeddings({
        imageRoot: root,
        catalog: CATALOG,
        outputData: out.data,
        outputMetadata: out.meta,
      }),
    ).toThrow(/no usable images/);
    expect(existsSync(out.data)).toBe(false);
    expect(existsSync(out.meta)).toBe(false);
  });

  it('fails on a missing image root', () => {
    const out = outPaths(tempDir());
    expect(() =>
      extractEmbeddings({
        imageRoot: join(tmpdir(), 'does-not-exist-xyz'),
        catalog: CATALOG,
        outputData: out.data,
        outputMetadata: out.meta,
      }),
    ).toThrow(/image root/);
  });
});
