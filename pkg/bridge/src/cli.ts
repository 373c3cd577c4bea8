#!/usr/bin/env node
/**
 * bridge extract:  image folders -> embedding container
 * bridge generate: manifest -> image folders (stub or live service)
 */

import { readFileSync } from 'fs';
import { pathToFileURL } from 'url';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { DEFAULT_BACKBONE } from './backbone.js';
import { loadCatalog } from './catalog.js';
import { extractEmbeddings } from './extract.js';
import { generateFromManifest } from './generate.js';
import { parseManifest } from './manifest.js';
import { Origin, Split } from './container.js';

const ENV_SERVICE_URL = 'BRIDGE_SERVICE_URL';
const ENV_API_TOKEN = 'BRIDGE_API_TOKEN';

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .scriptName('bridge')
    .command(
      'extract',
      'extract embeddings from a class-per-folder image tree',
      y =>
        y
          .option('images', { type: 'string', demandOption: true, describe: 'image root, one folder per class' })
          .option('catalog', { type: 'string', demandOption: true, describe: 'lexicon TSV mapping names to class ids' })
          .option('output', { type: 'string', demandOption: true, describe: 'container file to write' })
          .option('metadata', { type: 'string', describe: 'sidecar path (default: <output>.meta.jsonl)' })
          .option('summary', { type: 'string', describe: 'summary path (default: <output>.summary.json)' })
          .option('origin', { type: 'string', choices: ['real', 'synthetic'] as const, default: 'real' })
          .option('split', { type: 'string', choices: ['train', 'test'] as const, default: 'train' })
          .option('backbone', { type: 'string', default: DEFAULT_BACKBONE.id })
          .option('resize', { type: 'number', default: DEFAULT_BACKBONE.resize })
          .option('dim', { type: 'number', default: DEFAULT_BACKBONE.dim }),
      args => {
        const summary = extractEmbeddings({
          imageRoot: args.images,
          catalog: loadCatalog(args.catalog),
          outputData: args.output,
          outputMetadata: args.metadata ?? `${args.output}.meta.jsonl`,
          summaryPath: args.summary ?? `${args.output}.summary.json`,
          backbone: { id: args.backbone, resize: args.resize, dim: args.dim },
          origin: args.origin as Origin,
          split: args.split as Split,
          log: line => console.error(line),
        });
        console.log(
          `wrote ${summary.sample_count} samples x ${summary.backbone.dim} dims -> ${args.output}` +
            (summary.warning_count ? ` (${summary.warning_count} folders skipped)` : ''),
        );
      },
    )
    .command(
      'generate',
      'generate images for every class in a manifest',
      y =>
        y
          .option('manifest', { type: 'string', demandOption: true })
          .option('out', { type: 'string', demandOption: true, describe: 'output root, one folder per class' })
          .option('stub', { type: 'boolean', describe: 'fabricate placeholder images offline' })
          .option('live', { type: 'boolean', describe: 'call the generation service' })
          .option('size', { type: 'number', default: 64, describe: 'stub image side length' })
          .option('service-url', { type: 'string', describe: `generation endpoint (or $${ENV_SERVICE_URL})` })
          .check(a => {
            if (Boolean(a.stub) === Boolean(a.live)) {
              throw new Error('pick exactly one of --stub or --live');
            }
            return true;
          }),
      async args => {
        const records = parseManifest(readFileSync(args.manifest, 'utf-8'), args.manifest);
        const result = await generateFromManifest(records, {
          outDir: args.out,
          mode: args.stub ? 'stub' : 'live',
          imageSize: args.size,
          serviceUrl: args['service-url'] ?? process.env[ENV_SERVICE_URL],
          apiToken: process.env[ENV_API_TOKEN],
          log: line => console.error(line),
        });
        console.log(
          `generated ${result.generated.length}, skipped ${result.skipped.length}, ` +
            `failed ${result.failed.length} of ${records.length} classes -> ${args.out}`,
        );
        if (result.failed.length > 0) {
          exitCode = 1;
        }
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${msg ?? err?.message ?? err}`);
      process.exit(msg ? 2 : 1);
    })
    .parseAsync();
  return exitCode;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  main(hideBin(process.argv)).then(code => {
    process.exitCode = code;
  });
}
