import { describe, expect, it } from "vitest";

import { EXPECTED_COLUMNS, parseCsv } from "../src/csv";
import { groupSeries, KINDS } from "../src/figures";

const HEADER = EXPECTED_COLUMNS.join(",");

function csv(rows: string[]): string {
  return HEADER + "\n" + rows.join("\n") + "\n";
}

function lifRow(scheme: string, N: number, nf: number, trial: number, value: number): string {
  return `sumlif_vs_n,${scheme},,2,3,${N},2,2,${nf},20,${trial},sum_lif,${value}`;
}

describe("axis contracts", () => {
  it("pins the caption-mandated scales per kind", () => {
    expect([KINDS.fig3.xScale, KINDS.fig3.yScale]).toEqual(["log", "log"]);
    expect([KINDS.fig4.xScale, KINDS.fig4.yScale]).toEqual(["linear", "log"]);
    expect([KINDS.fig5.xScale, KINDS.fig5.yScale]).toEqual(["linear", "linear"]);
    expect([KINDS.fig6.xScale, KINDS.fig6.yScale]).toEqual(["log", "linear"]);
  });

  it("labels rates in bits/s/Hz and SNR in dB", () => {
    expect(KINDS.fig5.yLabel).toContain("bits/s/Hz");
    expect(KINDS.fig5.xLabel).toContain("dB");
  });
});

describe("groupSeries", () => {
  it("averages trials and groups by scheme/receiver/n_f", () => {
    const rows = parseCsv(csv([
      lifRow("svd_oia", 25, 4, 0, 0.10),
      lifRow("svd_oia", 25, 4, 1, 0.30),
      lifRow("svd_oia", 50, 4, 0, 0.05),
      lifRow("gc_oia", 25, 4, 0, 0.50),
      lifRow("gc_oia", 25, 8, 0, 0.40),
    ]));
    const { series, warnings } = groupSeries(rows, "fig3");
    expect(warnings).toHaveLength(0);
    expect(series.map((s) => s.key)).toEqual([
      "gc_oia nf=4", "gc_oia nf=8", "svd_oia nf=4",
    ]);
    const svd = series.find((s) => s.key === "svd_oia nf=4")!;
    expect(svd.points).toEqual([
      { x: 25, y: 0.2 },
      { x: 50, y: 0.05 },
    ]);
  });

  it("folds n_f into the x axis for fig4", () => {
    const rows = parseCsv(csv([
      lifRow("rc_oia", 100, 1, 0, 0.3),
      lifRow("rc_oia", 100, 2, 0, 0.2),
      lifRow("rc_oia", 100, 3, 0, 0.1),
    ]));
    const { series } = groupSeries(rows, "fig4");
    expect(series).toHaveLength(1);
    expect(series[0].key).toBe("rc_oia");
    expect(series[0].points.map((p) => p.x)).toEqual([1, 2, 3]);
  });

  it("ignores other metrics and accepts summary rows", () => {
    const rows = parseCsv(csv([
      "rate_vs_snr,rc_oia,zf,2,3,20,2,2,6,0,0,sum_rate,2.0",
      "rate_vs_snr,rc_oia,zf,2,3,20,2,2,6,0,0,outage,1",
      "rate_vs_snr,rc_oia,zf,2,3,20,2,2,6,10,-1,mean_sum_rate,7.5",
    ]));
    const { series } = groupSeries(rows, "fig5");
    expect(series).toHaveLength(1);
    expect(series[0].points).toEqual([
      { x: 0, y: 2.0 },
      { x: 10, y: 7.5 },
    ]);
  });

  it("skips empty groups with a warning", () => {
    const rows = parseCsv(csv([
      lifRow("svd_oia", 25, 4, 0, 0.0),   // non-positive: unplottable on log y
      lifRow("gc_oia", 25, 4, 0, 0.5),
    ]));
    const { series, warnings } = groupSeries(rows, "fig3");
    expect(series.map((s) => s.key)).toEqual(["gc_oia nf=4"]);
    expect(warnings.join(" ")).toMatch(/svd_oia nf=4: empty group, skipped/);
  });

  it("warns when the metric is absent entirely", () => {
    const rows = parseCsv(csv([
      "rate_vs_snr,rc_oia,zf,2,3,20,2,2,6,0,0,sum_rate,2.0",
    ]));
    const { series, warnings } = groupSeries(rows, "fig3");
    expect(series).toHaveLength(0);
    expect(warnings.join(" ")).toMatch(/no rows carry metric sum_lif/);
  });
});
