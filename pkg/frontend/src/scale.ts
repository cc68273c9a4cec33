/** Linear and log axis scales with deterministic tick generation. */

import { AxisScale } from "./figures";

export interface Scale {
  toPixel(v: number): number;
  ticks: number[];
  kind: AxisScale;
}

export function makeScale(
  kind: AxisScale,
  lo: number,
  hi: number,
  pixLo: number,
  pixHi: number,
): Scale {
  if (kind === "log") {
    const a = Math.log10(lo);
    const b = Math.log10(hi);
    const pad = (b - a) * 0.04 || 0.05;
    const [la, lb] = [a - pad, b + pad];
    return {
      kind,
      toPixel: (v) => pixLo + ((Math.log10(v) - la) / (lb - la)) * (pixHi - pixLo),
      ticks: logTicks(lo, hi),
    };
  }
  const pad = (hi - lo) * 0.04 || 0.5;
  const [la, lb] = [lo - pad, hi + pad];
  return {
    kind,
    toPixel: (v) => pixLo + ((v - la) / (lb - la)) * (pixHi - pixLo),
    ticks: linearTicks(lo, hi),
  };
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (lo === hi) return [lo];
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / target)));
  let step = step0;
  for (const m of [1, 2, 5, 10]) {
    if (span / (step0 * m) <= target) {
      step = step0 * m;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const first = Math.floor(Math.log10(lo));
  const last = Math.ceil(Math.log10(hi));
  for (let e = first; e <= last; e++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, e);
      if (v >= lo * 0.999 && v <= hi * 1.001) ticks.push(v);
    }
  }
  // decades only when the range is wide
  if (ticks.length > 9) {
    return ticks.filter((v) => {
      const e = Math.log10(v);
      return Math.abs(e - Math.round(e)) < 1e-9;
    });
  }
  return ticks;
}

/** Fixed-precision number formatting so output never drifts. */
export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(2);
  return String(Number(v.toPrecision(6)));
}

export function fmtPix(v: number): string {
  return v.toFixed(2);
}
