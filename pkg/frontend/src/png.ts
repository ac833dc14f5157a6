// Minimal PNG writer/reader for 8-bit RGB, used to export semantic maps
// outside the browser (tests, CLI tooling). The compressor is injected so
// this module stays runtime-agnostic: pass node:zlib's deflateSync /
// inflateSync in Node. Browsers use canvas.toBlob instead.

export type Codec = (data: Uint8Array) => Uint8Array;

export interface RGBImage {
  width: number;
  height: number;
  pixels: Uint8Array; // RGB, row-major, 3 bytes per pixel
}

const SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) {
    c = CRC_TABLE[(c ^ bytes[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, body: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + body.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, body.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(body, 8);
  view.setUint32(8 + body.length, crc32(out.subarray(4, 8 + body.length)));
  return out;
}

export function encodePng(image: RGBImage, deflate: Codec): Uint8Array {
  const { width, height, pixels } = image;
  if (pixels.length !== width * height * 3) {
    throw new Error(`pixel buffer is ${pixels.length} bytes, expected ${width * height * 3}`);
  }
  const ihdr = new Uint8Array(13);
  const ihdrView = new DataView(ihdr.buffer);
  ihdrView.setUint32(0, width);
  ihdrView.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type: truecolor RGB
  // compression 0, filter 0, interlace 0

  const stride = width * 3;
  const raw = new Uint8Array((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0; // filter: none
    raw.set(pixels.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }

  const parts = [
    new Uint8Array(SIGNATURE),
    chunk("IHDR", ihdr),
    chunk("IDAT", deflate(raw)),
    chunk("IEND", new Uint8Array(0)),
  ];
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let off = 0;
  for (const p of parts) {
    out.set(p, off);
    off += p.length;
  }
  return out;
}

/** Reads PNGs this module wrote (8-bit RGB, filter "none" per scanline). */
export function decodePng(data: Uint8Array, inflate: Codec): RGBImage {
  for (let i = 0; i < 8; i++) {
    if (data[i] !== SIGNATURE[i]) throw new Error("not a PNG file");
  }
  let off = 8;
  let width = 0;
  let height = 0;
  const idat: Uint8Array[] = [];
  while (off < data.length) {
    const view = new DataView(data.buffer, data.byteOffset + off);
    const length = view.getUint32(0);
    const type = String.fromCharCode(data[off + 4], data[off + 5], data[off + 6], data[off + 7]);
    const body = data.subarray(off + 8, off + 8 + length);
    if (type === "IHDR") {
      const hv = new DataView(body.buffer, body.byteOffset);
      width = hv.getUint32(0);
      height = hv.getUint32(4);
      if (body[8] !== 8 || body[9] !== 2 || body[12] !== 0) {
        throw new Error("unsupported PNG flavor (need 8-bit RGB, non-interlaced)");
      }
    } else if (type === "IDAT") {
      idat.push(body);
    }
    off += 12 + length;
    if (type === "IEND") break;
  }
  const compressed = new Uint8Array(idat.reduce((n, p) => n + p.length, 0));
  let ioff = 0;
  for (const p of idat) {
    compressed.set(p, ioff);
    ioff += p.length;
  }
  const raw = inflate(compressed);
  const stride = width * 3;
  const pixels = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    if (raw[y * (stride + 1)] !== 0) {
      throw new Error("unsupported PNG scanline filter");
    }
    pixels.set(raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1)), y * stride);
  }
  return { width, height, pixels };
}

export function layerToRgb(data: Uint8ClampedArray, width: number, height: number): RGBImage {
  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    pixels[i * 3] = data[i * 4];
    pixels[i * 3 + 1] = data[i * 4 + 1];
    pixels[i * 3 + 2] = data[i * 4 + 2];
  }
  return { width, height, pixels };
}
