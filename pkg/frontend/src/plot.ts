/** Figure frame: margins, axes, gridlines, series, legend. */

import { BLACK, Color, GREY, PALETTE, Raster } from "./raster.js";
import { textWidth } from "./font.js";
import { Scale } from "./scales.js";

export interface Margins { left: number; right: number; top: number; bottom: number }

export const DEFAULT_SIZE = { width: 800, height: 560 };
export const DEFAULT_MARGINS: Margins = { left: 78, right: 24, top: 40, bottom: 52 };

export class Chart {
  readonly raster: Raster;
  readonly m: Margins;

  constructor(width = DEFAULT_SIZE.width, height = DEFAULT_SIZE.height,
              margins: Margins = DEFAULT_MARGINS) {
    this.raster = new Raster(width, height);
    this.m = margins;
  }

  get x0(): number { return this.m.left; }
  get x1(): number { return this.raster.width - this.m.right; }
  get y0(): number { return this.raster.height - this.m.bottom; }  // pixel of axis min
  get y1(): number { return this.m.top; }                          // pixel of axis max

  frame(title: string, xlabel: string, ylabel: string, xs: Scale, ys: Scale): void {
    const r = this.raster;
    for (const t of xs.ticks()) {
      const px = Math.round(xs.toPixel(t.value));
      if (px < this.x0 || px > this.x1) continue;
      r.line(px, this.y1, px, this.y0, GREY);
      r.line(px, this.y0, px, this.y0 + 4, BLACK);
      r.text(px - textWidth(t.label) / 2, this.y0 + 8, t.label);
    }
    for (const t of ys.ticks()) {
      const py = Math.round(ys.toPixel(t.value));
      if (py > this.y0 || py < this.y1) continue;
      r.line(this.x0, py, this.x1, py, GREY);
      r.line(this.x0 - 4, py, this.x0, py, BLACK);
      r.text(this.x0 - 8 - textWidth(t.label), py - 3, t.label);
    }
    // frame on top of gridlines
    r.line(this.x0, this.y0, this.x1, this.y0, BLACK);
    r.line(this.x0, this.y1, this.x1, this.y1, BLACK);
    r.line(this.x0, this.y0, this.x0, this.y1, BLACK);
    r.line(this.x1, this.y0, this.x1, this.y1, BLACK);
    r.text((this.x0 + this.x1) / 2 - textWidth(title, 2) / 2, 12, title, BLACK, 2);
    r.text((this.x0 + this.x1) / 2 - textWidth(xlabel) / 2,
           this.raster.height - 16, xlabel);
    r.textVertical(14, (this.y0 + this.y1) / 2 + textWidth(ylabel) / 2, ylabel);
  }

  series(xvals: number[], yvals: number[], xs: Scale, ys: Scale, color: Color,
         markers = true): void {
    const pts = xvals.map((x, i) => [xs.toPixel(x), ys.toPixel(yvals[i])] as const);
    for (let i = 1; i < pts.length; i++) {
      this.raster.line(pts[i - 1][0], pts[i - 1][1], pts[i][0], pts[i][1], color, 2);
    }
    if (markers) for (const [px, py] of pts) this.raster.marker(px, py, color);
  }

  legend(entries: { label: string; color: Color }[]): void {
    const pad = 6;
    const lineH = 12;
    const w = Math.max(...entries.map((e) => textWidth(e.label))) + 26;
    const h = entries.length * lineH + 2 * pad;
    const x = this.x1 - w - 8;
    const y = this.y1 + 8;
    this.raster.fillRect(x, y, w, h, [255, 255, 255]);
    this.raster.line(x, y, x + w, y, BLACK);
    this.raster.line(x, y + h, x + w, y + h, BLACK);
    this.raster.line(x, y, x, y + h, BLACK);
    this.raster.line(x + w, y, x + w, y + h, BLACK);
    entries.forEach((e, i) => {
      const ey = y + pad + i * lineH;
      this.raster.fillRect(x + pad, ey + 1, 12, 5, e.color);
      this.raster.text(x + pad + 18, ey, e.label);
    });
  }
}

export function seriesColor(i: number): Color {
  return PALETTE[i % PALETTE.length];
}

export function padLinear(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo || Math.abs(hi) || 1) * 0.06;
  return [lo - pad, hi + pad];
}

export function padLog(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (lo <= 0) throw new Error("log axis needs positive values");
  return [lo / 1.35, hi * 1.35];
}
