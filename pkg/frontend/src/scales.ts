/** Linear and logarithmic axis scales with tick generation. */

export interface Scale {
  toPixel(v: number): number;
  ticks(): { value: number; label: string }[];
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const mant = v / 10 ** e;
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${trim(mant.toPrecision(3))}X`;
    return `${m}1E${e}`.replace("X1E", "E");
  }
  return trim(v.toPrecision(4));
}

function trim(s: string): string {
  return s.includes(".") ? s.replace(/0+$/, "").replace(/\.$/, "") : s;
}

export class LinearScale implements Scale {
  constructor(private lo: number, private hi: number,
              private p0: number, private p1: number) {
    if (hi === lo) { this.lo -= 0.5; this.hi += 0.5; }
  }

  toPixel(v: number): number {
    return this.p0 + ((v - this.lo) / (this.hi - this.lo)) * (this.p1 - this.p0);
  }

  ticks(): { value: number; label: string }[] {
    const span = this.hi - this.lo;
    const raw = span / 5;
    const mag = 10 ** Math.floor(Math.log10(raw));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= 6) ?? 10 * mag;
    const first = Math.ceil(this.lo / step) * step;
    const out = [];
    for (let v = first; v <= this.hi + 1e-12 * span; v += step) {
      const snapped = Math.abs(v) < step / 1e6 ? 0 : v;
      out.push({ value: snapped, label: fmt(snapped) });
    }
    return out;
  }
}

export class LogScale implements Scale {
  private llo: number;
  private lhi: number;

  constructor(lo: number, hi: number, private p0: number, private p1: number) {
    if (lo <= 0 || hi <= 0) throw new Error("log scale needs positive data");
    this.llo = Math.log10(lo);
    this.lhi = Math.log10(hi);
    if (this.lhi - this.llo < 1e-12) { this.llo -= 0.5; this.lhi += 0.5; }
  }

  toPixel(v: number): number {
    return this.p0 + ((Math.log10(v) - this.llo) / (this.lhi - this.llo)) * (this.p1 - this.p0);
  }

  ticks(): { value: number; label: string }[] {
    const out: { value: number; label: string }[] = [];
    const d0 = Math.ceil(this.llo - 1e-9);
    const d1 = Math.floor(this.lhi + 1e-9);
    if (d1 - d0 >= 1) {
      for (let d = d0; d <= d1; d++) out.push({ value: 10 ** d, label: `1E${d}` });
      return out;
    }
    // less than a decade: mantissa ticks 1, 2, 5 within range
    for (let d = Math.floor(this.llo); d <= Math.ceil(this.lhi); d++) {
      for (const m of [1, 2, 5]) {
        const v = m * 10 ** d;
        const lv = Math.log10(v);
        if (lv >= this.llo - 1e-9 && lv <= this.lhi + 1e-9) {
          out.push({ value: v, label: fmt(v) });
        }
      }
    }
    return out;
  }
}
