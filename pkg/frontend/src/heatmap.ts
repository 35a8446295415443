/**
 * Binary scalar-field parsing and heatmap colorization.
 *
 * Field format: uint32 LE width, uint32 LE height, then width*height
 * float32 LE samples, row-major. Each field is normalized to its own
 * finite min/max before colorization (the fields have wildly different
 * ranges).
 */

export interface ScalarField {
  width: number;
  height: number;
  data: Float32Array;
}

export function parseField(buffer: ArrayBuffer): ScalarField {
  if (buffer.byteLength < 8) {
    throw new Error("field buffer too short");
  }
  const head = new DataView(buffer, 0, 8);
  const width = head.getUint32(0, true);
  const height = head.getUint32(4, true);
  const expected = 8 + 4 * width * height;
  if (buffer.byteLength < expected) {
    throw new Error(
      `field buffer truncated: ${buffer.byteLength} < ${expected}`,
    );
  }
  return { width, height, data: new Float32Array(buffer, 8, width * height) };
}

export function normalize(field: ScalarField): Float32Array {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of field.data) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const span = hi > lo ? hi - lo : 1.0;
  const out = new Float32Array(field.data.length);
  for (let i = 0; i < field.data.length; i++) {
    const v = field.data[i];
    out[i] = Number.isFinite(v) ? (v - lo) / span : 0;
  }
  return out;
}

/** Map normalized values to RGBA bytes with a blue->yellow ramp. */
export function colorize(norm: Float32Array, alpha = 160): Uint8ClampedArray {
  const rgba = new Uint8ClampedArray(norm.length * 4);
  for (let i = 0; i < norm.length; i++) {
    const t = norm[i];
    rgba[4 * i] = Math.round(255 * t);
    rgba[4 * i + 1] = Math.round(255 * t);
    rgba[4 * i + 2] = Math.round(255 * (1 - t));
    rgba[4 * i + 3] = alpha;
  }
  return rgba;
}

/** Parse a binary PGM (P5) mask/gray payload into width/height/bytes. */
export function parsePgm(buffer: ArrayBuffer): ScalarField {
  const bytes = new Uint8Array(buffer);
  const text = new TextDecoder().decode(bytes.slice(0, 64));
  const m = text.match(/^P5\s+(\d+)\s+(\d+)\s+(\d+)\s/);
  if (!m) throw new Error("not a P5 PGM payload");
  const [, w, h] = m;
  const width = parseInt(w, 10);
  const height = parseInt(h, 10);
  const offset = m[0].length;
  const data = new Float32Array(width * height);
  for (let i = 0; i < width * height; i++) {
    data[i] = bytes[offset + i] / 255;
  }
  return { width, height, data };
}
