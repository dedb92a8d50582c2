export { InputError, parseCsv, requireColumns } from "./csv.js";
export type { Table } from "./csv.js";
export { fmtG9, parseBool, parseNum, parseOptionalNum } from "./fmt.js";
export {
  compareSummary,
  crossCheck,
  readRecords,
  recomputeSummary,
  RECORD_COLUMNS,
  SUMMARY_COLUMNS,
} from "./aggregate.js";
export type { Mismatch, RunRecord } from "./aggregate.js";
export { DEFAULT_METRICS, render } from "./figure.js";
export type { FigureSpec } from "./figure.js";
export { PALETTE, renderFigure } from "./svg.js";
export type { Panel, Series, SeriesPoint } from "./svg.js";
export { main } from "./cli.js";
