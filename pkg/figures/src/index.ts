export { readCsv, requireColumns, SchemaError } from "./csv.js";
export type { Table } from "./csv.js";
export { sweepBars } from "./sweepBars.js";
export { rollingLine } from "./rollingLine.js";
export { histogramOverlay } from "./histogramOverlay.js";
export { main } from "./cli.js";
