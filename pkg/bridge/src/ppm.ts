/**
 * Binary PPM (P6) encode/decode.
 *
 * PPM is the interchange image format for the bridge: the stub generator
 * writes it and the extractor reads it, so the whole pipeline works without
 * native image codecs. Only 8-bit RGB (maxval 255) is supported.
 */

export interface RgbImage {
  width: number;
  height: number;
  /** row-major RGB triplets, length = width * height * 3 */
  pixels: Uint8Array;
}

export class PpmError extends Error {}

export function encodePpm(image: RgbImage): Buffer {
  const { width, height, pixels } = image;
  if (width < 1 || height < 1) {
    throw new PpmError(`bad dimensions ${width}x${height}`);
  }
  if (pixels.length !== width * height * 3) {
    throw new PpmError(
      `pixel buffer is ${pixels.length} bytes, expected ${width * height * 3}`,
    );
  }
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, 'ascii');
  return Buffer.concat([header, pixels]);
}

export function decodePpm(data: Buffer): RgbImage {
  // Header is ASCII tokens (magic, width, height, maxval) separated by
  // whitespace, with #-comments allowed between them.
  let pos = 0;

  function nextToken(): string {
    while (pos < data.length) {
      const c = data[pos];
      if (c === 0x23) {
        // comment runs to end of line
        while (pos < data.length && data[pos] !== 0x0a) pos++;
      } else if (c === 0x20 || c === 0x09 || c === 0x0a || c === 0x0d) {
        pos++;
      } else {
        break;
      }
    }
    const start = pos;
    while (pos < data.length && !isSpace(data[pos])) pos++;
    if (start === pos) throw new PpmError('unexpected end of header');
    return data.subarray(start, pos).toString('ascii');
  }

  const magic = nextToken();
  if (magic !== 'P6') {
    throw new PpmError(`bad magic ${JSON.stringify(magic)}, expected P6`);
  }
  const width = parseDim(nextToken(), 'width');
  const height = parseDim(nextToken(), 'height');
  const maxval = parseDim(nextToken(), 'maxval');
  if (maxval !== 255) {
    throw new PpmError(`unsupported maxval ${maxval}, only 255 is handled`);
  }
  pos++; // single whitespace byte after maxval, then raster
  const expected = width * height * 3;
  const pixels = data.subarray(pos, pos + expected);
  if (pixels.length !== expected) {
    throw new PpmError(
      `raster is ${pixels.length} bytes, header implies ${expected}`,
    );
  }
  return { width, height, pixels: new Uint8Array(pixels) };
}

function isSpace(c: number): boolean {
  return c === 0x20 || c === 0x09 || c === 0x0a || c === 0x0d;
}

function parseDim(token: string, what: string): number {
  const n = Number(token);
  if (!Number.isInteger(n) || n < 1) {
    throw new PpmError(`bad ${what} ${JSON.stringify(token)}`);
  }
  return n;
}
