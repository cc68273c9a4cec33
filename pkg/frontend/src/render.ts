/** File-level rendering: CSV path(s) in, SVG file out. */

import * as fs from "fs";
import * as path from "path";

import { parseCsv, Row } from "./csv";
import { FigureKind, groupSeries, KINDS } from "./figures";
import { renderSvg } from "./svg";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  title?: string;
}

export interface RenderResult {
  output: string;
  seriesCount: number;
  warnings: string[];
}

export function render(spec: FigureSpec): RenderResult {
  if (!(spec.kind in KINDS)) {
    throw new Error(`unknown figure kind ${spec.kind}; expected one of ${Object.keys(KINDS).join(", ")}`);
  }
  const rows: Row[] = [];
  for (const input of spec.inputs) {
    const text = fs.readFileSync(input, "utf-8");
    rows.push(...parseCsv(text, input));
  }
  if (rows.length === 0) {
    throw new Error(`${spec.inputs.join(", ")}: no data rows to plot`);
  }
  const { series, warnings } = groupSeries(rows, spec.kind);
  const title = spec.title ?? defaultTitle(rows, spec.kind);
  const svg = renderSvg(spec.kind, series, title);
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg, "utf-8");
  return { output: spec.output, seriesCount: series.length, warnings };
}

function defaultTitle(rows: Row[], kind: FigureKind): string {
  const r = rows[0];
  const base = `K=${r.K}, M=${r.M}, L=${r.L}, S=${r.S}`;
  switch (kind) {
    case "fig3":
      return `sum-LIF vs N (${base})`;
    case "fig4":
      return `sum-LIF vs n_f (${base}, N=${r.N})`;
    case "fig5":
      return `rate vs SNR (${base}, N=${r.N}, n_f=${r.n_f})`;
    case "fig6":
      return `rate vs N (${base}, n_f=${r.n_f})`;
  }
}
