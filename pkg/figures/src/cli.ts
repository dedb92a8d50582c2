#!/usr/bin/env node
/**
 * figure-gen plot --in summary.csv --x num_parents --out fig.svg
 *                 [--logy] [--records records.csv]
 *
 * Exit codes: 0 drawn, 2 bad arguments or bad input file, 1 anything else.
 */

import { pathToFileURL } from "node:url";

import { InputError } from "./csv.js";
import { FigureSpec, render } from "./figure.js";

const USAGE = `usage: figure-gen plot --in SUMMARY_CSV --x SWEEP_PARAM --out FIG_FILE
                       [--logy] [--records RECORDS_CSV]

Draws one panel per metric (sample count, decision gap) from a sweep
summary: one line per algorithm, markers at each sweep value, error bars
at one standard error. Output is SVG markup written to --out.

  --in       summary CSV produced by the experiment runner
  --x        sweep parameter expected on the x axis (e.g. num_parents)
  --out      output file; always receives SVG, so an .svg name is best
  --logy     log-scale the sample-count panel (the gap panel stays linear)
  --records  per-run records CSV; the summary is recomputed from it and the
             plot is refused if any aggregate disagrees
`;

export function main(
  argv: string[],
  errWrite: (s: string) => void = (s) => process.stderr.write(s),
): number {
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    errWrite(USAGE);
    return argv.length === 0 ? 2 : 0;
  }
  if (argv[0] !== "plot") {
    errWrite(`unknown command: ${argv[0]}\n${USAGE}`);
    return 2;
  }

  const opts: Record<string, string> = {};
  let logy = false;
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--logy") {
      logy = true;
      continue;
    }
    if (arg === "--in" || arg === "--x" || arg === "--out" || arg === "--records") {
      const value = argv[i + 1];
      if (value === undefined) {
        errWrite(`${arg} needs a value\n`);
        return 2;
      }
      opts[arg.slice(2)] = value;
      i++;
      continue;
    }
    errWrite(`unknown option: ${arg}\n${USAGE}`);
    return 2;
  }
  for (const required of ["in", "x", "out"]) {
    if (!(required in opts)) {
      errWrite(`--${required} is required\n${USAGE}`);
      return 2;
    }
  }

  const spec: FigureSpec = {
    input: opts["in"],
    x: opts["x"],
    out: opts["out"],
    logy,
    records: opts["records"],
  };
  try {
    render(spec);
  } catch (e) {
    const msg = e instanceof Error ? e.message : String(e);
    errWrite(`error: ${msg}\n`);
    if (e instanceof InputError) {
      return 2;
    }
    if (e && typeof e === "object" && (e as NodeJS.ErrnoException).code === "ENOENT") {
      return 2;
    }
    return 1;
  }
  if (!spec.out.endsWith(".svg")) {
    errWrite(
      `note: wrote SVG markup to ${spec.out}; an .svg extension is recommended\n`,
    );
  }
  return 0;
}

if (
  process.argv[1] &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(main(process.argv.slice(2)));
}
