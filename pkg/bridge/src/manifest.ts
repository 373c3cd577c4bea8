/**
 * Generation manifest parsing (JSONL, one record per class), as emitted by
 * the harness's `fpcil manifest` subcommand.
 */

export interface ManifestRecord {
  class_id: number;
  name: string;
  prompt: string;
  n_samples: number;
  guidance_scale: number;
  generation_seed: number;
}

const FIELDS: (keyof ManifestRecord)[] = [
  'class_id',
  'name',
  'prompt',
  'n_samples',
  'guidance_scale',
  'generation_seed',
];

export class ManifestError extends Error {}

export function parseManifest(text: string, source = '<manifest>'): ManifestRecord[] {
  const records: ManifestRecord[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim().length === 0) continue;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new ManifestError(`${source}:${i + 1}: not valid JSON: ${err}`);
    }
    for (const field of FIELDS) {
      if (!(field in obj)) {
        throw new ManifestError(`${source}:${i + 1}: missing field ${field}`);
      }
    }
    const rec: ManifestRecord = {
      class_id: asInt(obj.class_id, 'class_id', source, i + 1),
      name: asStr(obj.name, 'name', source, i + 1),
      prompt: asStr(obj.prompt, 'prompt', source, i + 1),
      n_samples: asInt(obj.n_samples, 'n_samples', source, i + 1),
      guidance_scale: asNum(obj.guidance_scale, 'guidance_scale', source, i + 1),
      generation_seed: asInt(obj.generation_seed, 'generation_seed', source, i + 1),
    };
    if (rec.n_samples < 1) {
      throw new ManifestError(`${source}:${i + 1}: n_samples must be >= 1`);
    }
    records.push(rec);
  }
  if (records.length === 0) {
    throw new ManifestError(`${source}: no records`);
  }
  return records;
}

function asInt(v: unknown, field: string, source: string, lineno: number): number {
  if (typeof v !== 'number' || !Number.isInteger(v)) {
    throw new ManifestError(`${source}:${lineno}: ${field} must be an integer, got ${JSON.stringify(v)}`);
  }
  return v;
}

function asNum(v: unknown, field: string, source: string, lineno: number): number {
  if (typeof v !== 'number' || !Number.isFinite(v)) {
    throw new ManifestError(`${source}:${lineno}: ${field} must be a number, got ${JSON.stringify(v)}`);
  }
  return v;
}

function asStr(v: unknown, field: string, source: string, lineno: number): string {
  if (typeof v !== 'string' || v.length === 0) {
    throw new ManifestError(`${source}:${lineno}: ${field} must be a nonempty string`);
  }
  return v;
}
