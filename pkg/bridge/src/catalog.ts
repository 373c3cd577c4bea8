/**
 * Class catalog loaded from the harness's lexicon TSV (name TAB definition,
 * UTF-8). Class ids follow line order starting at 0, matching how the
 * harness numbers the same file.
 */

import { readFileSync } from 'fs';

export interface Catalog {
  /** name -> class id, in lexicon line order */
  ids: Map<string, number>;
  definitions: Map<string, string>;
}

export class CatalogError extends Error {}

export function parseCatalog(text: string, source = '<lexicon>'): Catalog {
  const ids = new Map<string, number>();
  const definitions = new Map<string, string>();
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim().length === 0 || line.startsWith('#')) continue;
    const tab = line.indexOf('\t');
    if (tab < 0) {
      throw new CatalogError(`${source}:${i + 1}: expected name<TAB>definition`);
    }
    const name = line.slice(0, tab).trim();
    if (ids.has(name)) {
      throw new CatalogError(`${source}:${i + 1}: duplicate name ${JSON.stringify(name)}`);
    }
    ids.set(name, ids.size);
    definitions.set(name, line.slice(tab + 1).trim());
  }
  if (ids.size === 0) {
    throw new CatalogError(`${source}: no entries`);
  }
  return { ids, definitions };
}

export function loadCatalog(path: string): Catalog {
  return parseCatalog(readFileSync(path, 'utf-8'), path);
}
