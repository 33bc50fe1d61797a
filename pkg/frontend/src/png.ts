/**
 * Minimal PNG output for the raster path.
 *
 * Encodes an RGBA buffer as a standard 8-bit truecolor-alpha PNG using
 * node's zlib for the IDAT stream, and rasterizes plot geometry with
 * plain scanline primitives.  Text is not rasterized; the legend renders
 * as color swatches (use the SVG output for fully labeled figures).
 */

import { deflateSync } from "node:zlib";

import type { Geometry } from "./plot.js";

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

function crc32(data: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of data) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Buffer {
  const header = Buffer.alloc(4);
  header.writeUInt32BE(data.length);
  const body = Buffer.concat([Buffer.from(type, "ascii"), data]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([header, body, crc]);
}

export function encodePng(width: number, height: number, rgba: Uint8Array): Buffer {
  if (rgba.length !== width * height * 4) {
    throw new Error("rgba buffer size does not match dimensions");
  }
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // truecolor with alpha
  // compression, filter, interlace all zero

  const stride = width * 4;
  const raw = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0; // filter: none
    raw.set(rgba.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }

  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 4);
    this.data.fill(255);
  }

  set(x: number, y: number, color: [number, number, number]): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const at = (y * this.width + x) * 4;
    this.data[at] = color[0];
    this.data[at + 1] = color[1];
    this.data[at + 2] = color[2];
    this.data[at + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: [number, number, number]): void {
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(ax, ay, color);
      if (ax === bx && ay === by) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ax += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  disc(cx: number, cy: number, r: number, color: [number, number, number]): void {
    for (let y = Math.floor(cy - r); y <= Math.ceil(cy + r); y++) {
      for (let x = Math.floor(cx - r); x <= Math.ceil(cx + r); x++) {
        if ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) {
          this.set(x, y, color);
        }
      }
    }
  }

  rect(x: number, y: number, w: number, h: number, color: [number, number, number]): void {
    for (let yy = y; yy < y + h; yy++) {
      for (let xx = x; xx < x + w; xx++) {
        this.set(xx, yy, color);
      }
    }
  }
}

function hexColor(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

const FRAME: [number, number, number] = [51, 51, 51];
const GRID: [number, number, number] = [221, 221, 221];

export function renderPng(geometry: Geometry): Buffer {
  const raster = new Raster(geometry.width, geometry.height);
  const { plot } = geometry;

  for (const tick of geometry.yTicks) {
    raster.line(plot.x0, tick.pixel, plot.x1, tick.pixel, GRID);
  }
  for (const tick of geometry.xTicks) {
    raster.line(tick.pixel, plot.y0, tick.pixel, plot.y1, GRID);
  }
  raster.line(plot.x0, plot.y0, plot.x1, plot.y0, FRAME);
  raster.line(plot.x0, plot.y1, plot.x1, plot.y1, FRAME);
  raster.line(plot.x0, plot.y0, plot.x0, plot.y1, FRAME);
  raster.line(plot.x1, plot.y0, plot.x1, plot.y1, FRAME);

  geometry.curves.forEach((curve, i) => {
    const color = hexColor(curve.color);
    for (let p = 1; p < curve.points.length; p++) {
      raster.line(curve.points[p - 1].x, curve.points[p - 1].y,
                  curve.points[p].x, curve.points[p].y, color);
    }
    for (const point of curve.points) {
      raster.disc(point.x, point.y, point.extrapolation ? 3 : 1.5, color);
    }
    raster.rect(Math.round(plot.x1 - 150), Math.round(plot.y0 + 2 + i * 18), 14, 10, color);
  });

  return encodePng(geometry.width, geometry.height, raster.data);
}
