import { readFileSync, writeFileSync } from "node:fs";

import { crossCheck } from "./aggregate.js";
import { InputError, parseCsv, requireColumns } from "./csv.js";
import { parseNum } from "./fmt.js";
import { Panel, renderFigure, Series } from "./svg.js";

/** What to draw: one figure, one panel per metric, one series per algorithm. */
export interface FigureSpec {
  /** Path of the summary CSV to plot. */
  input: string;
  /** Sweep parameter on the x axis; must match the file's sweep_param. */
  x: string;
  /** Output path; receives SVG markup. */
  out: string;
  /** Log-scale the sample-count panel. The gap panel stays linear
   *  because gaps can be exactly zero. */
  logy?: boolean;
  /** Column stems to plot as panels, each needing <stem>_mean and
   *  <stem>_stderr columns. */
  metrics?: string[];
  /** Optional records CSV; when given, the summary is recomputed from it
   *  and any disagreement aborts the render. */
  records?: string;
}

export const DEFAULT_METRICS = ["samples", "true_gap"];

function metricSeries(
  rows: string[][],
  col: Map<string, number>,
  metric: string,
  algorithms: string[],
): Series[] {
  return algorithms.map((algorithm) => {
    const points = rows
      .filter((r) => r[col.get("algorithm")!] === algorithm)
      .map((r, i) => {
        const where = (name: string) => `${algorithm} row ${i + 1}, ${name}`;
        return {
          x: parseNum(r[col.get("sweep_value")!], where("sweep_value")),
          y: parseNum(r[col.get(`${metric}_mean`)!], where(`${metric}_mean`)),
          err: parseNum(
            r[col.get(`${metric}_stderr`)!],
            where(`${metric}_stderr`),
          ),
        };
      });
    return { name: algorithm, points };
  });
}

/**
 * Read spec.input, build the figure, and write SVG to spec.out. Reads only;
 * nothing is written until every check has passed, so a failed render leaves
 * no output file behind.
 */
export function render(spec: FigureSpec): void {
  const text = readFileSync(spec.input, "utf8");
  const table = parseCsv(text);
  if (table.rows.length === 0) {
    throw new InputError(`no data rows in ${spec.input}`);
  }

  const metrics = spec.metrics ?? DEFAULT_METRICS;
  const needed = ["sweep_param", "sweep_value", "algorithm"];
  for (const m of metrics) {
    needed.push(`${m}_mean`, `${m}_stderr`);
  }
  const col = requireColumns(table, needed);

  const rows = table.rows.filter((r) => r[col.get("sweep_param")!] === spec.x);
  if (rows.length === 0) {
    const present = [
      ...new Set(table.rows.map((r) => r[col.get("sweep_param")!])),
    ];
    throw new InputError(
      `no rows with sweep_param "${spec.x}" in ${spec.input} ` +
        `(file has: ${present.join(", ")})`,
    );
  }

  const algorithms: string[] = [];
  for (const r of rows) {
    const name = r[col.get("algorithm")!];
    if (!algorithms.includes(name)) {
      algorithms.push(name);
    }
  }

  if (spec.records) {
    const mismatches = crossCheck(text, readFileSync(spec.records, "utf8"));
    if (mismatches.length > 0) {
      const shown = mismatches
        .slice(0, 5)
        .map(
          (m) =>
            `row ${m.row} ${m.column}: summary=${m.summary} recomputed=${m.recomputed}`,
        )
        .join("; ");
      throw new InputError(
        `summary disagrees with records (${mismatches.length} cell(s)): ${shown}`,
      );
    }
  }

  const panels: Panel[] = metrics.map((metric) => ({
    title: `${metric} vs ${spec.x}`,
    xLabel: spec.x,
    yLabel: metric,
    logy: Boolean(spec.logy) && metric === "samples",
    series: metricSeries(rows, col, metric, algorithms),
  }));

  writeFileSync(spec.out, renderFigure(panels), "utf8");
}
