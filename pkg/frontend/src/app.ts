// Browser wiring: two paintable semantic canvases, a style-image slot,
// tuning controls, and the transfer round trip. All synthesis state lives
// in the CanvasSession; this file only moves pixels between it and the DOM.

import { submitTransfer, TransferClient, ConfigOverrides, ServiceError } from "./api.js";
import { DEFAULT_PALETTE } from "./palette.js";
import { CanvasSession, createSession, paintStroke, undo, copySourceToTarget } from "./session.js";
import { Layer, Point } from "./stroke.js";

const OMEGA_STOPS = [0, 0.1, 1, 10, 50, 100, 1000];
const SIZE = 256;

const client = new TransferClient(window.location.origin.replace(/:\d+$/, ":8900"));
let session: CanvasSession = createSession(SIZE, SIZE);

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function drawLayer(canvas: HTMLCanvasElement, layer: Layer): void {
  const ctx = canvas.getContext("2d")!;
  ctx.putImageData(new ImageData(layer.data.slice(), layer.width, layer.height), 0, 0);
}

function refresh(): void {
  drawLayer($("source-canvas") as HTMLCanvasElement, session.layers.source);
  drawLayer($("target-canvas") as HTMLCanvasElement, session.layers.target);
  $("busy").style.visibility = session.transferInFlight ? "visible" : "hidden";
}

function canvasToB64(canvas: HTMLCanvasElement): Promise<string> {
  return new Promise((resolve, reject) => {
    canvas.toBlob((blob) => {
      if (!blob) return reject(new Error("canvas export failed"));
      const reader = new FileReader();
      reader.onload = () => resolve((reader.result as string).split(",")[1]);
      reader.onerror = () => reject(reader.error);
      reader.readAsDataURL(blob);
    }, "image/png");
  });
}

function banner(message: string, retryable: boolean): void {
  const el = $("banner");
  el.textContent = message + (retryable ? " - check the service and retry" : "");
  el.style.display = message ? "block" : "none";
}

function wirePainting(canvas: HTMLCanvasElement, layerName: "source" | "target"): void {
  let path: Point[] = [];
  let painting = false;
  const pos = (ev: PointerEvent): Point => {
    const rect = canvas.getBoundingClientRect();
    return {
      x: ((ev.clientX - rect.left) / rect.width) * canvas.width,
      y: ((ev.clientY - rect.top) / rect.height) * canvas.height,
    };
  };
  canvas.addEventListener("pointerdown", (ev) => {
    painting = true;
    path = [pos(ev)];
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (painting) path.push(pos(ev));
  });
  const finish = () => {
    if (!painting) return;
    painting = false;
    paintStroke(session, layerName, path);
    refresh();
  };
  canvas.addEventListener("pointerup", finish);
  canvas.addEventListener("pointerleave", finish);
}

function gatherOverrides(): ConfigOverrides {
  const overrides: ConfigOverrides = {
    omega1: OMEGA_STOPS[Number(($("omega1") as HTMLInputElement).value)],
    omega2: OMEGA_STOPS[Number(($("omega2") as HTMLInputElement).value)],
    fusion: ($("fusion") as HTMLSelectElement).value as ConfigOverrides["fusion"],
  };
  const stages = ["I", "II", "III"].filter(
    (s) => ($(`stage-${s}`) as HTMLInputElement).checked,
  );
  overrides.stages = stages;
  return overrides;
}

async function runTransfer(): Promise<void> {
  banner("", false);
  try {
    const [sourceB64, targetB64] = await Promise.all([
      canvasToB64($("source-canvas") as HTMLCanvasElement),
      canvasToB64($("target-canvas") as HTMLCanvasElement),
    ]);
    refresh();
    const result = await submitTransfer(session, client, { sourceB64, targetB64 }, gatherOverrides());
    ($("result") as HTMLImageElement).src = `data:image/png;base64,${result.image}`;
    $("timings").textContent = Object.entries(result.timings)
      .map(([stage, sec]) => `${stage}: ${sec.toFixed(2)}s`)
      .join("  ");
  } catch (err) {
    if (err instanceof ServiceError) {
      banner(err.stage ? `stage ${err.stage}: ${err.message}` : err.message, err.retryable);
    } else {
      banner(String(err), false);
    }
  } finally {
    refresh();
  }
}

function init(): void {
  const paletteBox = $("palette");
  DEFAULT_PALETTE.forEach((color, idx) => {
    const btn = document.createElement("button");
    btn.style.background = `rgb(${color.r},${color.g},${color.b})`;
    btn.className = "swatch";
    btn.title = `label ${idx}`;
    btn.onclick = () => {
      session.brush.label = idx;
    };
    paletteBox.appendChild(btn);
  });

  ($("brush-size") as HTMLInputElement).oninput = (ev) => {
    session.brush.size = Number((ev.target as HTMLInputElement).value);
  };
  $("undo-source").onclick = () => {
    undo(session, "source");
    refresh();
  };
  $("undo-target").onclick = () => {
    undo(session, "target");
    refresh();
  };
  $("copy-layer").onclick = () => {
    copySourceToTarget(session);
    refresh();
  };
  ($("style-file") as HTMLInputElement).onchange = async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file) return;
    const buf = new Uint8Array(await file.arrayBuffer());
    let binary = "";
    buf.forEach((b) => (binary += String.fromCharCode(b)));
    session.styleImageB64 = btoa(binary);
    ($("style-preview") as HTMLImageElement).src = URL.createObjectURL(file);
  };
  $("transfer").onclick = () => void runTransfer();

  wirePainting($("source-canvas") as HTMLCanvasElement, "source");
  wirePainting($("target-canvas") as HTMLCanvasElement, "target");
  refresh();
}

init();
