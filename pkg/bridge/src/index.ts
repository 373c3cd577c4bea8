export {
  BackboneSpec,
  DEFAULT_BACKBONE,
  boxResample,
  extractFeature,
  fnv1a32,
  mulberry32,
  projectionMatrix,
} from './backbone.js';
export { Catalog, CatalogError, loadCatalog, parseCatalog } from './catalog.js';
export {
  ContainerError,
  ContainerSample,
  HEADER_SIZE,
  MAGIC,
  Origin,
  Split,
  VERSION,
  encodeContainer,
  readContainer,
  writeContainer,
} from './container.js';
export { BridgeJob, ExtractError, ExtractSummary, extractEmbeddings } from './extract.js';
export {
  GenerateError,
  GenerateMode,
  GenerateOptions,
  GenerateResult,
  generateFromManifest,
  stubImage,
} from './generate.js';
export { ManifestError, ManifestRecord, parseManifest } from './manifest.js';
export { PpmError, RgbImage, decodePpm, encodePpm } from './ppm.js';
