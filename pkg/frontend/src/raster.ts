/** RGBA pixel buffer with the few drawing primitives the figures need. */

import { CHAR_W, GLYPH_H, GLYPH_W, glyph } from "./font.js";

export type Color = readonly [number, number, number];

export const BLACK: Color = [0, 0, 0];
export const WHITE: Color = [255, 255, 255];
export const GREY: Color = [200, 200, 200];

/** Fixed series palette (colorblind-safe-ish). */
export const PALETTE: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [148, 103, 189],
  [255, 127, 14],
  [140, 86, 75],
];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.pixels[4 * i] = background[0];
      this.pixels[4 * i + 1] = background[1];
      this.pixels[4 * i + 2] = background[2];
      this.pixels[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, c: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.pixels[i] = c[0];
    this.pixels[i + 1] = c[1];
    this.pixels[i + 2] = c[2];
    this.pixels[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, c: Color): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) this.set(x, y, c);
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, c: Color, thick = 1): void {
    // Bresenham; `thick` widens perpendicular-ish by stamping a small square
    let [xa, ya] = [Math.round(x0), Math.round(y0)];
    const [xb, yb] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.stamp(xa, ya, c, thick);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) { err += dy; xa += sx; }
      if (e2 <= dx) { err += dx; ya += sy; }
    }
  }

  private stamp(x: number, y: number, c: Color, thick: number): void {
    if (thick <= 1) { this.set(x, y, c); return; }
    const r = Math.floor(thick / 2);
    for (let j = -r; j <= thick - 1 - r; j++) {
      for (let i = -r; i <= thick - 1 - r; i++) this.set(x + i, y + j, c);
    }
  }

  marker(x: number, y: number, c: Color, size = 5): void {
    const r = Math.floor(size / 2);
    this.fillRect(Math.round(x) - r, Math.round(y) - r, size, size, c);
  }

  text(x: number, y: number, s: string, c: Color = BLACK, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let j = 0; j < rows.length; j++) {
        for (let i = 0; i < GLYPH_W; i++) {
          if (rows[j][i] === "1") {
            this.fillRect(cx + i * scale, cy + j * scale, scale, scale, c);
          }
        }
      }
      cx += CHAR_W * scale;
    }
  }

  /** Vertical text, rotated 90 degrees counterclockwise (for y-axis labels). */
  textVertical(x: number, y: number, s: string, c: Color = BLACK, scale = 1): void {
    let cy = Math.round(y);
    const cx = Math.round(x);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let j = 0; j < rows.length; j++) {
        for (let i = 0; i < GLYPH_W; i++) {
          if (rows[j][i] === "1") {
            // (i, j) -> (j, -i): rotate glyph so text reads bottom-to-top
            this.fillRect(cx + j * scale, cy - i * scale, scale, scale, c);
          }
        }
      }
      cy -= CHAR_W * scale;
    }
  }
}

export { GLYPH_H };
