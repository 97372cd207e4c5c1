/**
 * Figure models: group sweep rows into labelled series with the axis
 * convention of each figure kind (rate versus source power, or rate
 * versus the relay-to-source power ratio, both in dB).
 */

import { RateRow, SchemaError } from "./csv.js";

export const FIGURE_KINDS = [
  "bounds",
  "af_cf_vs_ps",
  "af_cf_vs_ratio",
  "df_vs_ratio",
  "cf_alloc_vs_ratio",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface SeriesPoint {
  x: number;
  y: number;
  stderr: number | null;
}

export interface Series {
  label: string;
  strategy: string;
  alloc: string;
  isBound: boolean;
  points: SeriesPoint[];
}

export interface FigureModel {
  kind: FigureKind;
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const TITLES: Record<FigureKind, string> = {
  bounds: "Outage and broadcasting bounds",
  af_cf_vs_ps: "AF / CF cooperation versus source power",
  af_cf_vs_ratio: "AF / CF cooperation versus relay power ratio",
  df_vs_ratio: "DF cooperation versus relay power ratio",
  cf_alloc_vs_ratio: "CF power allocations versus relay power ratio",
};

function xValue(kind: FigureKind, row: RateRow): number {
  if (kind === "bounds" || kind === "af_cf_vs_ps") {
    return row.psDb;
  }
  return row.prDb - row.psDb;
}

function seriesLabel(row: RateRow): string {
  return row.alloc === "-" ? row.strategy : `${row.strategy} [${row.alloc}]`;
}

export function buildFigure(rows: RateRow[], kind: FigureKind): FigureModel {
  if (!FIGURE_KINDS.includes(kind)) {
    throw new SchemaError(`unknown figure kind '${kind}'`);
  }
  if (rows.length === 0) {
    throw new SchemaError("no data rows to plot");
  }
  const units = new Set(rows.map((r) => r.units));
  if (units.size > 1) {
    throw new SchemaError(`mixed units in CSV: ${[...units].join(", ")}`);
  }

  const groups = new Map<string, Series>();
  for (const row of rows) {
    const label = seriesLabel(row);
    let series = groups.get(label);
    if (!series) {
      series = {
        label,
        strategy: row.strategy,
        alloc: row.alloc,
        isBound: row.strategy.startsWith("bound:"),
        points: [],
      };
      groups.set(label, series);
    }
    series.points.push({ x: xValue(kind, row), y: row.rate, stderr: row.stderr });
  }
  for (const series of groups.values()) {
    series.points.sort((a, b) => a.x - b.x);
  }

  const xLabel = kind === "bounds" || kind === "af_cf_vs_ps"
    ? "source power Ps [dB]"
    : "relay/source power ratio Pr/Ps [dB]";
  const unit = rows[0].units;
  return {
    kind,
    title: TITLES[kind],
    xLabel,
    yLabel: `average rate [${unit}/channel use]`,
    series: [...groups.values()],
  };
}
