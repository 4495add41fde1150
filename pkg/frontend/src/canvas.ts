/**
 * Tiny software raster: white background, RGB pixels, Bresenham lines with
 * optional thickness, rectangle fill, and bitmap-font text.
 */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph } from "./font";
import { encodePng } from "./png";

export type Color = readonly [number, number, number];

export const BLACK: Color = [0, 0, 0];
export const WHITE: Color = [255, 255, 255];
export const GRAY: Color = [150, 150, 150];
export const LIGHT_GRAY: Color = [220, 220, 220];

/** Category palette, one entry per series. */
export const PALETTE: Color[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
  [188, 189, 34],
  [23, 190, 207],
];

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const at = (y * this.width + x) * 3;
    this.pixels[at] = color[0];
    this.pixels[at + 1] = color[1];
    this.pixels[at + 2] = color[2];
  }

  fillRect(x: number, y: number, w: number, h: number, color: Color): void {
    for (let yy = y; yy < y + h; yy++) {
      for (let xx = x; xx < x + w; xx++) {
        this.set(xx, yy, color);
      }
    }
  }

  /** Bresenham line; thickness > 1 stamps a small disc at each step. */
  line(x0: number, y0: number, x1: number, y1: number, color: Color, thickness = 1): void {
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    const radius = Math.max(0, Math.floor(thickness / 2));
    for (;;) {
      if (radius === 0) {
        this.set(ax, ay, color);
      } else {
        for (let oy = -radius; oy <= radius; oy++) {
          for (let ox = -radius; ox <= radius; ox++) {
            if (ox * ox + oy * oy <= radius * radius) this.set(ax + ox, ay + oy, color);
          }
        }
      }
      if (ax === bx && ay === by) break;
      const doubled = 2 * err;
      if (doubled >= dy) {
        err += dy;
        ax += sx;
      }
      if (doubled <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  /** Draw text with the 5x7 font; (x, y) is the top-left corner. */
  text(x: number, y: number, value: string, color: Color = BLACK, scale = 1): void {
    let penX = x;
    for (const char of value) {
      const rows = glyph(char);
      for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
        for (let gx = 0; gx < GLYPH_WIDTH; gx++) {
          if (rows[gy][gx] !== "#") continue;
          this.fillRect(penX + gx * scale, y + gy * scale, scale, scale, color);
        }
      }
      penX += (GLYPH_WIDTH + 1) * scale;
    }
  }

  textWidth(value: string, scale = 1): number {
    return value.length * (GLYPH_WIDTH + 1) * scale - scale;
  }

  toPng(): Buffer {
    return encodePng(this.width, this.height, this.pixels);
  }

  /** Count of pixels that differ from the white background. */
  inkCount(): number {
    let count = 0;
    for (let i = 0; i < this.pixels.length; i += 3) {
      if (this.pixels[i] !== 255 || this.pixels[i + 1] !== 255 || this.pixels[i + 2] !== 255) {
        count++;
      }
    }
    return count;
  }
}
