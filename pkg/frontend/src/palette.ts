export interface RGB {
  r: number;
  g: number;
  b: number;
}

// Flat, saturated colors so every label survives PNG round trips exactly
// and stays far apart under the server's color-snapping tolerance.
export const DEFAULT_PALETTE: RGB[] = [
  { r: 0, g: 0, b: 0 },
  { r: 200, g: 40, b: 40 },
  { r: 40, g: 90, b: 200 },
  { r: 40, g: 170, b: 60 },
  { r: 230, g: 200, b: 40 },
  { r: 160, g: 60, b: 190 },
  { r: 240, g: 140, b: 30 },
  { r: 90, g: 210, b: 210 },
];

export function sameColor(a: RGB, b: RGB): boolean {
  return a.r === b.r && a.g === b.g && a.b === b.b;
}
