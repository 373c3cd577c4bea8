/**
 * Image generation driven by a harness manifest.
 *
 * Two modes. `stub` fabricates placeholder images offline, fully
 * deterministically, seeded by each record's generation_seed; it exists so
 * the rest of the pipeline can be exercised without any service. `live`
 * posts each record's prompt to a text-to-image endpoint and stores whatever
 * it returns. Both lay out one folder per class, named by the class name,
 * which is exactly what the extractor expects.
 *
 * Work is resumable at class granularity: a class folder that already holds
 * n_samples images is skipped on re-run.
 */

import { mkdirSync, readdirSync, writeFileSync, existsSync } from 'fs';
import { join } from 'path';
import { ManifestRecord } from './manifest.js';
import { encodePpm, RgbImage } from './ppm.js';
import { mulberry32 } from './backbone.js';

export type GenerateMode = 'stub' | 'live';

export interface GenerateOptions {
  outDir: string;
  mode: GenerateMode;
  /** stub image side length in pixels */
  imageSize?: number;
  serviceUrl?: string;
  apiToken?: string;
  /** attempts per class in live mode */
  retries?: number;
  backoffMs?: number;
  log?: (line: string) => void;
}

export interface GenerateResult {
  generated: string[];
  skipped: string[];
  failed: { name: string; error: string }[];
}

const DEFAULT_IMAGE_SIZE = 64;

export class GenerateError extends Error {}

export async function generateFromManifest(
  records: ManifestRecord[],
  options: GenerateOptions,
): Promise<GenerateResult> {
  const log = options.log ?? (() => {});
  const size = options.imageSize ?? DEFAULT_IMAGE_SIZE;
  if (options.mode === 'live' && !options.serviceUrl) {
    throw new GenerateError('live mode needs a service URL');
  }
  mkdirSync(options.outDir, { recursive: true });

  const result: GenerateResult = { generated: [], skipped: [], failed: [] };
  for (const rec of records) {
    const folder = join(options.outDir, rec.name);
    if (classComplete(folder, rec.n_samples)) {
      log(`skip ${rec.name} (complete)`);
      result.skipped.push(rec.name);
      continue;
    }
    try {
      if (options.mode === 'stub') {
        generateStubClass(rec, folder, size);
      } else {
        await generateLiveClass(rec, folder, options);
      }
      log(`generated ${rec.n_samples} images for ${rec.name}`);
      result.generated.push(rec.name);
    } catch (err) {
      const msg = err instanceof Error ? err.message : String(err);
      log(`FAILED ${rec.name}: ${msg}`);
      result.failed.push({ name: rec.name, error: msg });
    }
  }

  writeFileSync(
    join(options.outDir, 'generation_summary.json'),
    JSON.stringify(
      {
        mode: options.mode,
        classes: records.length,
        generated: result.generated,
        skipped: result.skipped,
        failed: result.failed,
      },
      null,
      2,
    ) + '\n',
  );
  return result;
}

function classComplete(folder: string, nSamples: number): boolean {
  if (!existsSync(folder)) return false;
  const images = readdirSync(folder).filter(f => f.endsWith('.ppm'));
  return images.length >= nSamples;
}

/** Placeholder image: class-specific base color plus seeded pixel noise. */
export function stubImage(rec: ManifestRecord, index: number, size: number): RgbImage {
  const rand = mulberry32((rec.generation_seed + 0x9e3779b9 * index) >>> 0);
  const [br, bg, bb] = classColor(rec.class_id);
  const pixels = new Uint8Array(size * size * 3);
  for (let i = 0; i < pixels.length; i += 3) {
    pixels[i] = clampByte(br + (rand() - 0.5) * 80);
    pixels[i + 1] = clampByte(bg + (rand() - 0.5) * 80);
    pixels[i + 2] = clampByte(bb + (rand() - 0.5) * 80);
  }
  return { width: size, height: size, pixels };
}

function generateStubClass(rec: ManifestRecord, folder: string, size: number): void {
  mkdirSync(folder, { recursive: true });
  for (let i = 0; i < rec.n_samples; i++) {
    const stem = `img_${String(i).padStart(3, '0')}`;
    writeFileSync(join(folder, `${stem}.ppm`), encodePpm(stubImage(rec, i, size)));
    writeFileSync(
      join(folder, `${stem}.json`),
      JSON.stringify({
        class_id: rec.class_id,
        name: rec.name,
        prompt: rec.prompt,
        guidance_scale: rec.guidance_scale,
        generation_seed: rec.generation_seed,
        index: i,
        width: size,
        height: size,
        source: 'stub',
      }) + '\n',
    );
  }
}

/**
 * Live service contract: POST {prompt, n_samples, guidance_scale, seed},
 * bearer token optional, response {images: [{data: <base64 PPM>, ...}]}.
 * Extra response fields are recorded verbatim in the per-image metadata;
 * nothing beyond the image bytes is asserted.
 */
async function generateLiveClass(
  rec: ManifestRecord,
  folder: string,
  options: GenerateOptions,
): Promise<void> {
  const attempts = options.retries ?? 3;
  const backoffMs = options.backoffMs ?? 500;
  let lastError: Error | null = null;
  for (let attempt = 1; attempt <= attempts; attempt++) {
    try {
      const body = await postOnce(rec, options);
      writeLiveClass(rec, folder, body);
      return;
    } catch (err) {
      lastError = err instanceof Error ? err : new Error(String(err));
      if (attempt < attempts && backoffMs > 0) {
        await new Promise(r => setTimeout(r, backoffMs * attempt));
      }
    }
  }
  throw lastError ?? new GenerateError('generation failed');
}

interface LiveResponse {
  images: ({ data: string } & Record<string, unknown>)[];
}

async function postOnce(rec: ManifestRecord, options: GenerateOptions): Promise<LiveResponse> {
  const headers: Record<string, string> = { 'Content-Type': 'application/json' };
  if (options.apiToken) headers['Authorization'] = `Bearer ${options.apiToken}`;
  const response = await fetch(options.serviceUrl!, {
    method: 'POST',
    headers,
    body: JSON.stringify({
      prompt: rec.prompt,
      n_samples: rec.n_samples,
      guidance_scale: rec.guidance_scale,
      seed: rec.generation_seed,
    }),
  });
  if (!response.ok) {
    throw new GenerateError(`service returned ${response.status}`);
  }
  const body = (await response.json()) as LiveResponse;
  if (!Array.isArray(body.images) || body.images.length === 0) {
    throw new GenerateError('service response has no images');
  }
  return body;
}

function writeLiveClass(rec: ManifestRecord, folder: string, body: LiveResponse): void {
  mkdirSync(folder, { recursive: true });
  body.images.forEach((img, i) => {
    const stem = `img_${String(i).padStart(3, '0')}`;
    writeFileSync(join(folder, `${stem}.ppm`), Buffer.from(img.data, 'base64'));
    const { data: _data, ...reported } = img;
    writeFileSync(
      join(folder, `${stem}.json`),
      JSON.stringify({
        class_id: rec.class_id,
        name: rec.name,
        prompt: rec.prompt,
        guidance_scale: rec.guidance_scale,
        generation_seed: rec.generation_seed,
        index: i,
        source: 'live',
        service: reported,
      }) + '\n',
    );
  });
}

function classColor(classId: number): [number, number, number] {
  // golden-angle hue walk keeps neighboring ids visually distinct
  const hue = (classId * 137.508) % 360;
  return hsvToRgb(hue, 0.6, 0.85);
}

function hsvToRgb(h: number, s: number, v: number): [number, number, number] {
  const c = v * s;
  const x = c * (1 - Math.abs(((h / 60) % 2) - 1));
  const m = v - c;
  let rgb: [number, number, number];
  if (h < 60) rgb = [c, x, 0];
  else if (h < 120) rgb = [x, c, 0];
  else if (h < 180) rgb = [0, c, x];
  else if (h < 240) rgb = [0, x, c];
  else if (h < 300) rgb = [x, 0, c];
  else rgb = [c, 0, x];
  return [
    Math.round((rgb[0] + m) * 255),
    Math.round((rgb[1] + m) * 255),
    Math.round((rgb[2] + m) * 255),
  ];
}

function clampByte(v: number): number {
  return Math.max(0, Math.min(255, Math.round(v)));
}
