/**
 * Strict reader for the simulator's experiment CSVs.
 *
 * Expected header (exact):
 *   experiment,scheme,receiver,K,M,N,L,S,n_f,snr_db,trial,metric,value
 */

export const EXPECTED_COLUMNS = [
  "experiment", "scheme", "receiver", "K", "M", "N", "L", "S",
  "n_f", "snr_db", "trial", "metric", "value",
] as const;

export interface Row {
  experiment: string;
  scheme: string;
  receiver: string;
  K: number;
  M: number;
  N: number;
  L: number;
  S: number;
  n_f: number;
  snr_db: number;
  trial: number;
  metric: string;
  value: number;
}

export class SchemaError extends Error {}

export function parseCsv(text: string, source = "<csv>"): Row[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(
      `${source}: empty CSV, expected header columns [${EXPECTED_COLUMNS.join(", ")}]`,
    );
  }
  const header = lines[0].split(",");
  const missing = EXPECTED_COLUMNS.filter((c) => !header.includes(c));
  const extra = header.filter((c) => !(EXPECTED_COLUMNS as readonly string[]).includes(c));
  const misordered = header.join(",") !== EXPECTED_COLUMNS.join(",");
  if (missing.length || extra.length || misordered) {
    const parts = [];
    if (missing.length) parts.push(`missing columns: ${missing.join(", ")}`);
    if (extra.length) parts.push(`unexpected columns: ${extra.join(", ")}`);
    if (!parts.length) parts.push("columns out of order");
    throw new SchemaError(
      `${source}: header mismatch (${parts.join("; ")}); expected exactly ` +
      `[${EXPECTED_COLUMNS.join(", ")}]`,
    );
  }
  const rows: Row[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== EXPECTED_COLUMNS.length) {
      throw new SchemaError(
        `${source}:${i + 1}: expected ${EXPECTED_COLUMNS.length} fields, got ${parts.length}`,
      );
    }
    const num = (idx: number, name: string): number => {
      const v = Number(parts[idx]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${source}:${i + 1}: non-numeric ${name}: ${parts[idx]}`);
      }
      return v;
    };
    rows.push({
      experiment: parts[0],
      scheme: parts[1],
      receiver: parts[2],
      K: num(3, "K"),
      M: num(4, "M"),
      N: num(5, "N"),
      L: num(6, "L"),
      S: num(7, "S"),
      n_f: num(8, "n_f"),
      snr_db: num(9, "snr_db"),
      trial: num(10, "trial"),
      metric: parts[11],
      value: num(12, "value"),
    });
  }
  return rows;
}
