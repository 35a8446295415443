/**
 * DOM wiring for the interactive loop: load an image, click the landmark,
 * draw foreground/barrier scribbles, tune parameters, segment, inspect
 * intermediates, iterate.
 */

import { GeosegClient } from "./api.js";
import { SessionStore } from "./state.js";
import { canvasToImage, drawContour, drawLandmark, drawStroke } from "./overlay.js";
import { colorize, normalize, parseField, parsePgm } from "./heatmap.js";

const SERVICE = (window as any).GEOSEG_URL ?? "http://127.0.0.1:8787";

type Tool = "landmark" | "foreground" | "barrier";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const client = new GeosegClient(SERVICE);
  const store = new SessionStore(client);
  const canvas = el<HTMLCanvasElement>("view");
  const ctx = canvas.getContext("2d")!;
  const scale = 3;
  let tool: Tool = "landmark";
  let baseImage: ImageBitmap | null = null;
  let overlayField: ImageData | null = null;
  let drawing = false;

  const status = el<HTMLDivElement>("status");
  const history = el<HTMLSelectElement>("history");

  function toast(msg: string): void {
    status.textContent = msg;
  }

  function redraw(): void {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (baseImage) {
      (ctx as any).imageSmoothingEnabled = false;
      ctx.drawImage(baseImage, 0, 0, canvas.width, canvas.height);
    }
    if (overlayField) ctx.putImageData(overlayField, 0, 0);
    const ann = store.annotations;
    if (ann) {
      for (const s of ann.strokes) drawStroke(ctx, s, scale);
      if (ann.landmark) drawLandmark(ctx, ann.landmark, scale);
    }
    const contour = store.activeContour;
    if (contour) drawContour(ctx, contour, scale);
  }

  function refreshHistory(): void {
    history.innerHTML = "";
    store.history.forEach((entry, i) => {
      const opt = document.createElement("option");
      opt.value = String(i);
      opt.textContent = `${entry.label} (${entry.barrierCount} barriers)`;
      opt.selected = i === store.activeHistory;
      history.appendChild(opt);
    });
  }

  el<HTMLInputElement>("file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    await store.open(file);
    const ann = store.annotations!;
    canvas.width = ann.width * scale;
    canvas.height = ann.height * scale;
    baseImage = await createImageBitmap(file).catch(() => null);
    overlayField = null;
    refreshHistory();
    redraw();
    toast(`session ready (${ann.width}x${ann.height}); click the landmark`);
  });

  for (const id of ["landmark", "foreground", "barrier"] as Tool[]) {
    el<HTMLButtonElement>(`tool-${id}`).addEventListener("click", () => {
      tool = id;
      toast(`tool: ${id}`);
    });
  }

  canvas.addEventListener("mousedown", (ev) => {
    const ann = store.annotations;
    if (!ann) return;
    const rect = canvas.getBoundingClientRect();
    const [x, y] = canvasToImage(ev.clientX - rect.left, ev.clientY - rect.top,
                                 scale, ann.width, ann.height);
    if (tool === "landmark") {
      ann.setLandmark(x, y);
      redraw();
      return;
    }
    drawing = true;
    ann.beginStroke(tool, x, y);
  });

  canvas.addEventListener("mousemove", (ev) => {
    const ann = store.annotations;
    if (!ann || !drawing) return;
    const rect = canvas.getBoundingClientRect();
    const [x, y] = canvasToImage(ev.clientX - rect.left, ev.clientY - rect.top,
                                 scale, ann.width, ann.height);
    ann.extendStroke(x, y);
    redraw();
  });

  window.addEventListener("mouseup", async () => {
    const ann = store.annotations;
    if (!ann || !drawing) return;
    drawing = false;
    const stroke = ann.endStroke();
    if (stroke) {
      await store.pushStroke(stroke);
      redraw();
    }
  });

  el<HTMLButtonElement>("undo").addEventListener("click", async () => {
    const ann = store.annotations;
    if (!ann) return;
    if (ann.undo()) {
      await store.resyncScribbles();
      redraw();
      toast("stroke removed");
    }
  });

  el<HTMLButtonElement>("segment").addEventListener("click", async () => {
    if (store.busy) {
      toast("run in progress");
      return;
    }
    const cfg: Record<string, unknown> = {};
    for (const key of ["metric", "mu", "alpha", "lam", "beta", "T", "sigma"]) {
      const input = document.getElementById(`cfg-${key}`) as HTMLInputElement | null;
      if (input && input.value !== "") {
        cfg[key] = key === "metric" ? input.value : Number(input.value);
      }
    }
    try {
      await store.configure(cfg);
    } catch (err) {
      toast(`config rejected: ${err}`);
      return;
    }
    toast("segmenting ...");
    const resp = await store.segment();
    if (!resp.ok) {
      toast(resp.error ?? "failed");
      return;
    }
    refreshHistory();
    redraw();
    toast(`contour with ${resp.contour!.vertices.length} vertices`);
  });

  history.addEventListener("change", () => {
    store.toggleHistory(Number(history.value));
    redraw();
  });

  el<HTMLSelectElement>("field").addEventListener("change", async (ev) => {
    const name = (ev.target as HTMLSelectElement).value;
    overlayField = null;
    if (name !== "none" && store.sessionId) {
      try {
        const buf = await client.getField(store.sessionId, name);
        const field = name.endsWith(".pgm") ? parsePgm(buf) : parseField(buf);
        const rgba = colorize(normalize(field));
        const img = new ImageData(field.width, field.height);
        img.data.set(rgba);
        const off = document.createElement("canvas");
        off.width = field.width;
        off.height = field.height;
        off.getContext("2d")!.putImageData(img, 0, 0);
        const scaled = document.createElement("canvas");
        scaled.width = field.width * scale;
        scaled.height = field.height * scale;
        const sctx = scaled.getContext("2d")!;
        (sctx as any).imageSmoothingEnabled = false;
        sctx.drawImage(off, 0, 0, scaled.width, scaled.height);
        overlayField = sctx.getImageData(0, 0, scaled.width, scaled.height);
      } catch (err) {
        toast(`field unavailable: ${err}`);
      }
    }
    redraw();
  });
}

boot().catch((err) => {
  document.body.textContent = `failed to start: ${err}`;
});
