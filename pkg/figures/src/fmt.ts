import { InputError } from "./csv.js";

/**
 * Format a float exactly the way the harness writes it: printf "%.9g".
 *
 * Nine significant digits, trailing zeros dropped, exponent notation outside
 * [1e-4, 1e9) with a sign and at least two exponent digits. Decimal ties at
 * the ninth digit round away from zero here but to even in printf; such a tie
 * needs an exact .xxxxxxxx5 binary fraction above 1e7 and cannot arise from
 * harness values.
 */
export function fmtG9(x: number): string {
  if (Number.isNaN(x)) return "nan";
  if (x === Infinity) return "inf";
  if (x === -Infinity) return "-inf";
  if (x === 0) return Object.is(x, -0) ? "-0" : "0";
  const m = x.toExponential(8).match(/^(-?)(\d)\.(\d{8})e([+-]\d+)$/);
  if (!m) {
    throw new Error(`cannot format ${x}`);
  }
  const [, sign, lead, frac, expStr] = m;
  const e = parseInt(expStr, 10);
  if (e < -4 || e >= 9) {
    const tail = frac.replace(/0+$/, "");
    const mantissa = tail ? `${lead}.${tail}` : lead;
    const absExp = String(Math.abs(e)).padStart(2, "0");
    return `${sign}${mantissa}e${e < 0 ? "-" : "+"}${absExp}`;
  }
  const digits = lead + frac;
  if (e >= 0) {
    const whole = digits.slice(0, e + 1);
    const tail = digits.slice(e + 1).replace(/0+$/, "");
    return sign + (tail ? `${whole}.${tail}` : whole);
  }
  const tail = ("0".repeat(-e - 1) + digits).replace(/0+$/, "");
  return `${sign}0.${tail}`;
}

/** Parse a required numeric cell. Empty cells are the writer's null. */
export function parseNum(cell: string, where: string): number {
  if (cell.trim() === "") {
    throw new InputError(`${where}: empty numeric field`);
  }
  const v = Number(cell);
  if (Number.isNaN(v)) {
    throw new InputError(`${where}: not a number: "${cell}"`);
  }
  return v;
}

export function parseOptionalNum(cell: string, where: string): number | null {
  if (cell === "") {
    return null;
  }
  return parseNum(cell, where);
}

export function parseBool(cell: string, where: string): boolean {
  if (cell === "true") return true;
  if (cell === "false") return false;
  throw new InputError(`${where}: expected true or false, got "${cell}"`);
}
