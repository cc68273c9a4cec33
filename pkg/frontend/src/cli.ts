#!/usr/bin/env node
/**
 * Figure renderer CLI.
 *
 *   render --kind fig3 --in results.csv [--in more.csv] --out fig3.svg [--title T]
 *
 * Exit codes: 0 success, 1 usage error, 2 schema/data error.
 */

import { SchemaError } from "./csv";
import { FigureKind, KINDS } from "./figures";
import { render } from "./render";

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    process.stderr.write("usage: render --kind fig3|fig4|fig5|fig6 --in CSV [--in CSV] --out SVG\n");
    return 1;
  }
  let kind: string | null = null;
  let out: string | null = null;
  let title: string | undefined;
  const inputs: string[] = [];
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      process.stderr.write(`missing value for ${flag}\n`);
      return 1;
    }
    switch (flag) {
      case "--kind":
        kind = value;
        break;
      case "--in":
        inputs.push(value);
        break;
      case "--out":
        out = value;
        break;
      case "--title":
        title = value;
        break;
      default:
        process.stderr.write(`unknown flag ${flag}\n`);
        return 1;
    }
  }
  if (!kind || !out || inputs.length === 0) {
    process.stderr.write("render needs --kind, --in, and --out\n");
    return 1;
  }
  if (!(kind in KINDS)) {
    process.stderr.write(`unknown figure kind ${kind}; expected ${Object.keys(KINDS).join(", ")}\n`);
    return 1;
  }
  try {
    const res = render({ kind: kind as FigureKind, inputs, output: out, title });
    for (const w of res.warnings) {
      process.stderr.write(`warning: ${w}\n`);
    }
    process.stdout.write(`wrote ${res.output} (${res.seriesCount} series)\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
