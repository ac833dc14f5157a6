import * as zlib from "node:zlib";

import { describe, expect, it } from "vitest";

import { decodePng, encodePng, layerToRgb } from "../src/png.js";
import { createSession, paintStroke } from "../src/session.js";
import { layerColors } from "../src/stroke.js";

const deflate = (d: Uint8Array) => new Uint8Array(zlib.deflateSync(d));
const inflate = (d: Uint8Array) => new Uint8Array(zlib.inflateSync(d));

describe("png codec", () => {
  it("round trips pixels exactly", () => {
    const width = 9;
    const height = 5;
    const pixels = new Uint8Array(width * height * 3);
    for (let i = 0; i < pixels.length; i++) pixels[i] = (i * 37) % 256;
    const png = encodePng({ width, height, pixels }, deflate);
    const back = decodePng(png, inflate);
    expect(back.width).toBe(width);
    expect(back.height).toBe(height);
    expect(back.pixels).toEqual(pixels);
  });

  it("rejects non-PNG data", () => {
    expect(() => decodePng(new Uint8Array([1, 2, 3]), inflate)).toThrow(/PNG/);
  });

  it("exported semantic layer contains only palette colors", () => {
    const session = createSession(32, 32);
    paintStroke(session, "target", [{ x: 8, y: 8 }, { x: 24, y: 20 }], { size: 6, label: 1 });
    const rgb = layerToRgb(session.layers.target.data, 32, 32);
    const png = encodePng(rgb, deflate);
    const back = decodePng(png, inflate);

    const seen = new Set<string>();
    for (let i = 0; i < back.pixels.length; i += 3) {
      seen.add(`${back.pixels[i]},${back.pixels[i + 1]},${back.pixels[i + 2]}`);
    }
    expect(seen.size).toBe(2);
    const palette = new Set(
      session.palette.map((c) => `${c.r},${c.g},${c.b}`),
    );
    for (const color of seen) {
      expect(palette.has(color)).toBe(true);
    }
    expect(layerColors(session.layers.target)).toHaveLength(2);
  });
});
