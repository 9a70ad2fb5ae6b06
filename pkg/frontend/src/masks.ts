/** Decode RLE mask payloads and paint them onto a canvas overlay. */

import type { MaskPayload } from "./types.js";

/** Little-endian (u16 class_id, u32 run_len) pairs over the flat raster. */
export function decodeRle(rleBase64: string, width: number, height: number): Uint16Array {
  const bin = atob(rleBase64);
  const bytes = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) bytes[i] = bin.charCodeAt(i);
  if (bytes.length % 6 !== 0) {
    throw new Error(`RLE payload of ${bytes.length} bytes is not whole pairs`);
  }
  const view = new DataView(bytes.buffer);
  const raster = new Uint16Array(width * height);
  let offset = 0;
  for (let p = 0; p < bytes.length; p += 6) {
    const classId = view.getUint16(p, true);
    const runLen = view.getUint32(p + 2, true);
    raster.fill(classId, offset, offset + runLen);
    offset += runLen;
  }
  if (offset !== width * height) {
    throw new Error(`run lengths sum to ${offset}, raster needs ${width * height}`);
  }
  return raster;
}

/** Deterministic, well-separated color per class id; 0 stays transparent. */
export function classColor(classId: number): [number, number, number, number] {
  if (classId === 0) return [0, 0, 0, 0];
  const hue = (classId * 137.508) % 360; // golden-angle spacing
  const [r, g, b] = hslToRgb(hue / 360, 0.65, 0.55);
  return [r, g, b, 170];
}

function hslToRgb(h: number, s: number, l: number): [number, number, number] {
  const q = l < 0.5 ? l * (1 + s) : l + s - l * s;
  const p = 2 * l - q;
  const channel = (t: number): number => {
    t = ((t % 1) + 1) % 1;
    if (t < 1 / 6) return p + (q - p) * 6 * t;
    if (t < 1 / 2) return q;
    if (t < 2 / 3) return p + (q - p) * (2 / 3 - t) * 6;
    return p;
  };
  return [
    Math.round(channel(h + 1 / 3) * 255),
    Math.round(channel(h) * 255),
    Math.round(channel(h - 1 / 3) * 255),
  ];
}

export function rasterToRgba(raster: Uint16Array): Uint8ClampedArray<ArrayBuffer> {
  const rgba = new Uint8ClampedArray(new ArrayBuffer(raster.length * 4));
  for (let i = 0; i < raster.length; i++) {
    const [r, g, b, a] = classColor(raster[i]);
    rgba[4 * i] = r;
    rgba[4 * i + 1] = g;
    rgba[4 * i + 2] = b;
    rgba[4 * i + 3] = a;
  }
  return rgba;
}

/** Paint a mask onto a canvas; returns false when no 2D context exists
 * (e.g. in DOM test environments without canvas support). */
export function renderMaskOverlay(
  canvas: HTMLCanvasElement,
  mask: MaskPayload,
  width: number,
  height: number,
): boolean {
  const ctx = canvas.getContext("2d");
  if (!ctx) return false;
  canvas.width = width;
  canvas.height = height;
  const raster = decodeRle(mask.rle, width, height);
  const image = new ImageData(rasterToRgba(raster), width, height);
  ctx.putImageData(image, 0, 0);
  return true;
}

/** Legend entries for the classes actually present in a raster. */
export function maskLegend(
  raster: Uint16Array,
  classes: Record<string, string>,
): { id: number; name: string; color: string }[] {
  const present = new Set<number>();
  for (const value of raster) present.add(value);
  present.delete(0);
  return [...present]
    .sort((a, b) => a - b)
    .map((id) => {
      const [r, g, b] = classColor(id);
      return { id, name: classes[String(id)] ?? `class ${id}`, color: `rgb(${r},${g},${b})` };
    });
}
