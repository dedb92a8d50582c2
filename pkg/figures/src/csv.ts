/**
 * Minimal CSV reader for the harness output files.
 *
 * Those files are machine-written from a fixed vocabulary: no quoting, no
 * escaping, no separators inside fields. Anything outside that shape is
 * rejected instead of guessed at.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class InputError extends Error {}

function stripCr(line: string): string {
  return line.endsWith("\r") ? line.slice(0, -1) : line;
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new InputError("empty file");
  }
  const header = stripCr(lines[0]).split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = stripCr(lines[i]).split(",");
    if (cells.length !== header.length) {
      throw new InputError(
        `line ${i + 1}: expected ${header.length} fields, got ${cells.length}`,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}

/**
 * Map column names to their indices. Raises one error naming every column
 * that is absent, so a truncated file is diagnosed in a single pass.
 */
export function requireColumns(
  table: Table,
  names: string[],
): Map<string, number> {
  const index = new Map<string, number>();
  table.header.forEach((name, i) => {
    if (!index.has(name)) {
      index.set(name, i);
    }
  });
  const missing = names.filter((n) => !index.has(n));
  if (missing.length > 0) {
    throw new InputError(`missing column(s): ${missing.join(", ")}`);
  }
  const out = new Map<string, number>();
  for (const n of names) {
    out.set(n, index.get(n)!);
  }
  return out;
}
