/**
 * Figure kinds and the grouping of CSV rows into line series.
 *
 * Each kind pins its axes the way the figure captions demand:
 *   fig3  sum-LIF vs N      log x, log y
 *   fig4  sum-LIF vs n_f    linear x, log y
 *   fig5  rate vs SNR       linear x, linear y
 *   fig6  rate vs N         log x, linear y
 */

import { Row } from "./csv";

export type FigureKind = "fig3" | "fig4" | "fig5" | "fig6";
export type AxisScale = "linear" | "log";

export interface KindSpec {
  metric: string;
  xColumn: "N" | "n_f" | "snr_db";
  xScale: AxisScale;
  yScale: AxisScale;
  xLabel: string;
  yLabel: string;
}

export const KINDS: Record<FigureKind, KindSpec> = {
  fig3: {
    metric: "sum_lif", xColumn: "N", xScale: "log", yScale: "log",
    xLabel: "N (users per cell)", yLabel: "sum-LIF",
  },
  fig4: {
    metric: "sum_lif", xColumn: "n_f", xScale: "linear", yScale: "log",
    xLabel: "n_f (feedforward bits)", yLabel: "sum-LIF",
  },
  fig5: {
    metric: "sum_rate", xColumn: "snr_db", xScale: "linear", yScale: "linear",
    xLabel: "SNR (dB)", yLabel: "achievable rate (bits/s/Hz)",
  },
  fig6: {
    metric: "sum_rate", xColumn: "N", xScale: "log", yScale: "linear",
    xLabel: "N (users per cell)", yLabel: "achievable rate (bits/s/Hz)",
  },
};

export interface Series {
  key: string;          // legend label
  scheme: string;
  receiver: string;
  n_f: number | null;   // null when n_f is the x axis
  points: Array<{ x: number; y: number }>;
}

export interface GroupResult {
  series: Series[];
  warnings: string[];
}

/** Average the kind's metric over trials and group rows into series. */
export function groupSeries(rows: Row[], kind: FigureKind): GroupResult {
  const spec = KINDS[kind];
  const warnings: string[] = [];
  const wanted = rows.filter(
    (r) => r.metric === spec.metric || r.metric === `mean_${spec.metric}`,
  );
  if (wanted.length === 0) {
    warnings.push(`no rows carry metric ${spec.metric}`);
  }
  // series identity: (scheme, receiver, n_f) minus the x-axis column
  const acc = new Map<string, Map<number, { sum: number; n: number }>>();
  for (const r of wanted) {
    const nf = spec.xColumn === "n_f" ? null : r.n_f;
    const key = JSON.stringify([r.scheme, r.receiver, nf]);
    const x = r[spec.xColumn];
    if (!acc.has(key)) acc.set(key, new Map());
    const byX = acc.get(key)!;
    if (!byX.has(x)) byX.set(x, { sum: 0, n: 0 });
    const cell = byX.get(x)!;
    cell.sum += r.value;
    cell.n += 1;
  }
  const series: Series[] = [];
  for (const key of Array.from(acc.keys()).sort()) {
    const [scheme, receiver, nf] = JSON.parse(key) as [string, string, number | null];
    const byX = acc.get(key)!;
    let points = Array.from(byX.entries())
      .map(([x, { sum, n }]) => ({ x, y: sum / n }))
      .sort((a, b) => a.x - b.x);
    const label = [scheme, receiver, nf === null ? "" : `nf=${nf}`]
      .filter((part) => part !== "")
      .join(" ");
    const dropped = points.filter(
      (p) =>
        (spec.xScale === "log" && p.x <= 0) || (spec.yScale === "log" && p.y <= 0),
    );
    if (dropped.length) {
      warnings.push(`${label}: dropped ${dropped.length} non-positive point(s) for log axes`);
      points = points.filter((p) => !dropped.includes(p));
    }
    if (points.length === 0) {
      warnings.push(`${label}: empty group, skipped`);
      continue;
    }
    series.push({ key: label, scheme, receiver, n_f: nf, points });
  }
  return { series, warnings };
}
