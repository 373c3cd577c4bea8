/**
 * Embedding extraction over a class-per-folder image tree.
 *
 * Folder names are class names, mapped to ids through the catalog. Each PPM
 * inside a known folder becomes one feature row. Unknown folders are skipped
 * with a warning and tallied in the summary file; they never abort the run.
 * Folders and files are processed in sorted order so repeat runs produce
 * identical container bytes.
 */

import { readdirSync, readFileSync, statSync, writeFileSync } from 'fs';
import { join } from 'path';
import { BackboneSpec, DEFAULT_BACKBONE, extractFeature } from './backbone.js';
import { Catalog } from './catalog.js';
import { ContainerSample, Origin, Split, writeContainer } from './container.js';
import { decodePpm } from './ppm.js';

export interface BridgeJob {
  imageRoot: string;
  catalog: Catalog;
  outputData: string;
  outputMetadata: string;
  summaryPath?: string;
  backbone?: BackboneSpec;
  origin?: Origin;
  split?: Split;
  log?: (line: string) => void;
}

export interface ExtractSummary {
  backbone: BackboneSpec;
  image_root: string;
  sample_count: number;
  class_counts: Record<string, number>;
  skipped: { folder: string; reason: string }[];
  warning_count: number;
}

export class ExtractError extends Error {}

export function extractEmbeddings(job: BridgeJob): ExtractSummary {
  const log = job.log ?? (() => {});
  const backbone = job.backbone ?? DEFAULT_BACKBONE;
  const origin = job.origin ?? 'real';
  const split = job.split ?? 'train';

  let entries: string[];
  try {
    entries = readdirSync(job.imageRoot).sort();
  } catch (err) {
    throw new ExtractError(`cannot read image root ${job.imageRoot}: ${err}`);
  }

  const samples: ContainerSample[] = [];
  const classCounts: Record<string, number> = {};
  const skipped: { folder: string; reason: string }[] = [];

  for (const entry of entries) {
    const folder = join(job.imageRoot, entry);
    if (!statSync(folder).isDirectory()) continue;
    const classId = job.catalog.ids.get(entry);
    if (classId === undefined) {
      log(`warning: skipping unknown class folder ${entry}`);
      skipped.push({ folder: entry, reason: 'not in catalog' });
      continue;
    }
    const images = readdirSync(folder)
      .filter(f => f.endsWith('.ppm'))
      .sort();
    for (const file of images) {
      const image = decodePpm(readFileSync(join(folder, file)));
      samples.push({
        feature: extractFeature(image, backbone),
        classId,
        origin,
        split,
      });
    }
    if (images.length > 0) {
      classCounts[entry] = images.length;
      log(`${entry}: ${images.length} images -> class ${classId}`);
    }
  }

  if (samples.length === 0) {
    throw new ExtractError(
      `no usable images under ${job.imageRoot}; nothing written`,
    );
  }

  writeContainer(samples, job.outputData, job.outputMetadata);

  const summary: ExtractSummary = {
    backbone,
    image_root: job.imageRoot,
    sample_count: samples.length,
    class_counts: classCounts,
    skipped,
    warning_count: skipped.length,
  };
  if (job.summaryPath) {
    writeFileSync(job.summaryPath, JSON.stringify(summary, null, 2) + '\n');
  }
  return summary;
}
