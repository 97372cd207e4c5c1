/**
 * Parser for the sweep CSV emitted by the relaylab CLI.
 *
 * The schema is a fixed eleven-column header; renderers never recompute
 * numeric values, they only read what the sweep wrote.
 */

export const EXPECTED_HEADER =
  "strategy,alloc,ps_db,pr_db,coop_mode,rate,units,stderr,n_samples,seed,warnings";

export interface RateRow {
  strategy: string;
  alloc: string;
  psDb: number;
  prDb: number;
  coopMode: string;
  rate: number;
  units: string;
  stderr: number | null;
  nSamples: number | null;
  seed: number | null;
  warnings: string[];
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

function parseNumber(cell: string, column: string, line: number): number {
  if (cell === "-inf") return -Infinity;
  if (cell === "inf") return Infinity;
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(
      `line ${line}: column '${column}' is not numeric (got '${cell}')`,
    );
  }
  return value;
}

function parseOptional(cell: string, column: string, line: number): number | null {
  if (cell === "") return null;
  return parseNumber(cell, column, line);
}

export function parseRateCsv(text: string): RateRow[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header line");
  }
  if (lines[0] !== EXPECTED_HEADER) {
    const got = lines[0].split(",");
    const want = EXPECTED_HEADER.split(",");
    const diffs: string[] = [];
    for (let i = 0; i < Math.max(got.length, want.length); i++) {
      if (got[i] !== want[i]) {
        diffs.push(`column ${i + 1}: expected '${want[i] ?? "(none)"}', got '${got[i] ?? "(none)"}'`);
      }
    }
    throw new SchemaError(`header mismatch: ${diffs.join("; ")}`);
  }
  if (lines.length === 1) {
    throw new SchemaError("CSV has a header but no data rows");
  }

  const rows: RateRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== 11) {
      throw new SchemaError(`line ${i + 1}: expected 11 columns, got ${cells.length}`);
    }
    const [strategy, alloc, psDb, prDb, coopMode, rate, units, stderr, nSamples, seed, warnings] = cells;
    rows.push({
      strategy,
      alloc,
      psDb: parseNumber(psDb, "ps_db", i + 1),
      prDb: parseNumber(prDb, "pr_db", i + 1),
      coopMode,
      rate: parseNumber(rate, "rate", i + 1),
      units,
      stderr: parseOptional(stderr, "stderr", i + 1),
      nSamples: parseOptional(nSamples, "n_samples", i + 1),
      seed: parseOptional(seed, "seed", i + 1),
      warnings: warnings === "" ? [] : warnings.split(";").filter((w) => w.length > 0),
    });
  }
  return rows;
}
