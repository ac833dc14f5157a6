import { DEFAULT_PALETTE, RGB } from "./palette.js";
import { cloneLayer, Layer, makeLayer, Point, strokePath } from "./stroke.js";

export type SemanticLayerName = "source" | "target";

export interface BrushState {
  size: number;
  label: number; // palette index
}

export interface TransferOutcome {
  imageB64: string;
  timings: Record<string, number>;
}

export interface CanvasSession {
  width: number;
  height: number;
  styleImageB64: string | null;
  layers: Record<SemanticLayerName, Layer>;
  undoStacks: Record<SemanticLayerName, Layer[]>;
  palette: RGB[];
  brush: BrushState;
  lastResult: TransferOutcome | null;
  transferInFlight: boolean;
}

const MAX_UNDO = 32;

export function createSession(width: number, height: number): CanvasSession {
  const background = DEFAULT_PALETTE[0];
  return {
    width,
    height,
    styleImageB64: null,
    layers: {
      source: makeLayer(width, height, background),
      target: makeLayer(width, height, background),
    },
    undoStacks: { source: [], target: [] },
    palette: DEFAULT_PALETTE.slice(),
    brush: { size: 8, label: 1 },
    lastResult: null,
    transferInFlight: false,
  };
}

/** Apply one brush stroke; the previous layer state is pushed for undo. */
export function paintStroke(
  session: CanvasSession,
  layerName: SemanticLayerName,
  path: Point[],
  brush: BrushState = session.brush,
): void {
  if (brush.label < 0 || brush.label >= session.palette.length) {
    throw new Error(`brush label ${brush.label} is not in the palette`);
  }
  const layer = session.layers[layerName];
  const stack = session.undoStacks[layerName];
  stack.push(cloneLayer(layer));
  if (stack.length > MAX_UNDO) stack.shift();
  strokePath(layer, path, brush.size, session.palette[brush.label]);
}

/** Restore the layer exactly as it was before the latest stroke. */
export function undo(session: CanvasSession, layerName: SemanticLayerName): boolean {
  const prev = session.undoStacks[layerName].pop();
  if (!prev) return false;
  session.layers[layerName] = prev;
  return true;
}

export function copySourceToTarget(session: CanvasSession): void {
  session.undoStacks.target.push(cloneLayer(session.layers.target));
  session.layers.target = cloneLayer(session.layers.source);
}
