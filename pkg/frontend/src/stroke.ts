import type { RGB } from "./palette.js";

export interface Layer {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA, row-major
}

export interface Point {
  x: number;
  y: number;
}

export function makeLayer(width: number, height: number, fill: RGB): Layer {
  const data = new Uint8ClampedArray(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    data[i * 4] = fill.r;
    data[i * 4 + 1] = fill.g;
    data[i * 4 + 2] = fill.b;
    data[i * 4 + 3] = 255;
  }
  return { width, height, data };
}

export function cloneLayer(layer: Layer): Layer {
  return { width: layer.width, height: layer.height, data: layer.data.slice() };
}

/** Recolor every pixel within `radius` of (cx, cy); off-canvas parts clip. */
export function stampDisk(layer: Layer, cx: number, cy: number, radius: number, color: RGB): void {
  const r2 = radius * radius;
  const x0 = Math.max(0, Math.floor(cx - radius));
  const x1 = Math.min(layer.width - 1, Math.ceil(cx + radius));
  const y0 = Math.max(0, Math.floor(cy - radius));
  const y1 = Math.min(layer.height - 1, Math.ceil(cy + radius));
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      const dx = x - cx;
      const dy = y - cy;
      if (dx * dx + dy * dy <= r2) {
        const i = (y * layer.width + x) * 4;
        layer.data[i] = color.r;
        layer.data[i + 1] = color.g;
        layer.data[i + 2] = color.b;
        layer.data[i + 3] = 255;
      }
    }
  }
}

/** Stamp the brush densely along a polyline so strokes have no gaps. */
export function strokePath(layer: Layer, path: Point[], radius: number, color: RGB): void {
  if (path.length === 0) return;
  stampDisk(layer, path[0].x, path[0].y, radius, color);
  for (let k = 1; k < path.length; k++) {
    const a = path[k - 1];
    const b = path[k];
    const dist = Math.hypot(b.x - a.x, b.y - a.y);
    const steps = Math.max(1, Math.ceil(dist / Math.max(1, radius / 2)));
    for (let s = 1; s <= steps; s++) {
      const t = s / steps;
      stampDisk(layer, a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, radius, color);
    }
  }
}

/** Distinct colors present in a layer, in first-seen order. */
export function layerColors(layer: Layer): RGB[] {
  const seen = new Set<number>();
  const colors: RGB[] = [];
  for (let i = 0; i < layer.width * layer.height; i++) {
    const r = layer.data[i * 4];
    const g = layer.data[i * 4 + 1];
    const b = layer.data[i * 4 + 2];
    const key = (r << 16) | (g << 8) | b;
    if (!seen.has(key)) {
      seen.add(key);
      colors.push({ r, g, b });
    }
  }
  return colors;
}
