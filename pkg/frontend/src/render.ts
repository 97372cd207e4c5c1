/**
 * Render one figure from a relaylab sweep CSV.
 *
 *   node dist/render.js --csv sweep.csv --kind af_cf_vs_ps --out figure.svg
 *
 * Exits with code 1 and column diagnostics on a schema mismatch; the
 * renderer never recomputes rates, it only draws what the CSV contains.
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";

import { parseRateCsv, SchemaError } from "./csv.js";
import { buildFigure, FIGURE_KINDS, FigureKind } from "./figures.js";
import { renderSvg } from "./svg.js";

interface Args {
  csv: string;
  kind: FigureKind;
  out: string;
  width: number;
  height: number;
}

function parseArgs(argv: string[]): Args {
  const opts = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key?.startsWith("--") || value === undefined) {
      throw new SchemaError(`malformed argument near '${key ?? ""}'`);
    }
    opts.set(key.slice(2), value);
  }
  const csv = opts.get("csv");
  const kind = opts.get("kind") as FigureKind | undefined;
  const out = opts.get("out");
  if (!csv || !kind || !out) {
    throw new SchemaError("usage: render --csv <file> --kind <kind> --out <file.svg>");
  }
  if (!FIGURE_KINDS.includes(kind)) {
    throw new SchemaError(`unknown figure kind '${kind}'; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  return {
    csv,
    kind,
    out,
    width: Number(opts.get("width") ?? 860),
    height: Number(opts.get("height") ?? 560),
  };
}

export function render(csvPath: string, kind: FigureKind, outPath: string,
                       width = 860, height = 560): void {
  const rows = parseRateCsv(readFileSync(csvPath, "utf-8"));
  const model = buildFigure(rows, kind);
  writeFileSync(outPath, renderSvg(model, width, height), "utf-8");
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    render(args.csv, args.kind, args.out, args.width, args.height);
    process.stderr.write(`wrote ${args.out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${String(err)}\n`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
