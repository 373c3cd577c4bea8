/**
 * Embedding container writer/reader.
 *
 * Binary layout (all little-endian): 4-byte magic "FPEB", u16 version,
 * u32 feature dim, u64 sample count, then count x dim float32 row-major.
 * A JSONL sidecar carries one {class_id, origin, split} record per row.
 * This matches the harness's ingest contract byte for byte.
 */

import { readFileSync, writeFileSync } from 'fs';

export const MAGIC = 'FPEB';
export const VERSION = 1;
export const HEADER_SIZE = 18;

export type Origin = 'real' | 'synthetic';
export type Split = 'train' | 'test';

export interface ContainerSample {
  feature: Float32Array;
  classId: number;
  origin: Origin;
  split: Split;
}

export class ContainerError extends Error {}

export function encodeContainer(samples: ContainerSample[]): {
  data: Buffer;
  metadata: string;
} {
  if (samples.length === 0) {
    throw new ContainerError('cannot write an empty embedding container');
  }
  const dim = samples[0].feature.length;
  for (const s of samples) {
    if (s.feature.length !== dim) {
      throw new ContainerError(
        `inconsistent feature dims: ${s.feature.length} vs ${dim}`,
      );
    }
    if (!Number.isInteger(s.classId) || s.classId < 0) {
      throw new ContainerError(`bad class id ${s.classId}`);
    }
  }

  const data = Buffer.alloc(HEADER_SIZE + samples.length * dim * 4);
  data.write(MAGIC, 0, 'ascii');
  data.writeUInt16LE(VERSION, 4);
  data.writeUInt32LE(dim, 6);
  data.writeBigUInt64LE(BigInt(samples.length), 10);
  const view = new DataView(data.buffer, data.byteOffset + HEADER_SIZE);
  let off = 0;
  for (const s of samples) {
    for (let i = 0; i < dim; i++) {
      view.setFloat32(off, s.feature[i], true);
      off += 4;
    }
  }

  const lines = samples.map(s =>
    JSON.stringify({ class_id: s.classId, origin: s.origin, split: s.split }),
  );
  return { data, metadata: lines.join('\n') + '\n' };
}

export function writeContainer(
  samples: ContainerSample[],
  dataPath: string,
  metadataPath: string,
): void {
  const { data, metadata } = encodeContainer(samples);
  writeFileSync(dataPath, data);
  writeFileSync(metadataPath, metadata, 'utf-8');
}

/** Read back a container pair; used by round-trip tests. */
export function readContainer(
  dataPath: string,
  metadataPath: string,
): ContainerSample[] {
  const data = readFileSync(dataPath);
  if (data.length < HEADER_SIZE) {
    throw new ContainerError(`${dataPath}: shorter than the header`);
  }
  const magic = data.subarray(0, 4).toString('ascii');
  if (magic !== MAGIC) {
    throw new ContainerError(`${dataPath}: bad magic ${JSON.stringify(magic)}`);
  }
  const version = data.readUInt16LE(4);
  if (version !== VERSION) {
    throw new ContainerError(`${dataPath}: unsupported version ${version}`);
  }
  const dim = data.readUInt32LE(6);
  const count = Number(data.readBigUInt64LE(10));
  const expected = count * dim * 4;
  if (data.length - HEADER_SIZE !== expected) {
    throw new ContainerError(
      `${dataPath}: payload is ${data.length - HEADER_SIZE} bytes, header implies ${expected}`,
    );
  }

  const metaLines = readFileSync(metadataPath, 'utf-8')
    .split('\n')
    .filter(line => line.trim().length > 0);
  if (metaLines.length !== count) {
    throw new ContainerError(
      `${metadataPath}: ${metaLines.length} metadata rows for ${count} samples`,
    );
  }

  const view = new DataView(data.buffer, data.byteOffset + HEADER_SIZE);
  const out: ContainerSample[] = [];
  for (let i = 0; i < count; i++) {
    const feature = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      feature[j] = view.getFloat32((i * dim + j) * 4, true);
    }
    const meta = JSON.parse(metaLines[i]);
    out.push({
      feature,
      classId: meta.class_id,
      origin: meta.origin,
      split: meta.split,
    });
  }
  return out;
}
