/** Rendering pipeline: spec + CSV text -> SVG string + numeric sidecar. */

import { parseTable, Table } from "./csv.js";
import { PANELS } from "./panels.js";
import { FigureSpec } from "./spec.js";

export interface Sidecar {
  schema: 1;
  panel: string;
  source: string;
  /** pure projection of the CSV columns; non-finite values become null */
  columns: Record<string, Array<number | null>>;
}

export interface Rendered {
  svg: string;
  sidecar: Sidecar;
}

// JSON cannot carry inf/nan; null is the documented stand-in
function jsonSafe(values: number[]): Array<number | null> {
  return values.map((v) => (Number.isFinite(v) ? v : null));
}

export function sidecarFor(spec: FigureSpec, table: Table): Sidecar {
  const columns: Record<string, Array<number | null>> = {};
  for (const name of table.header) {
    columns[name] = jsonSafe(table.columns.get(name)!);
  }
  return { schema: 1, panel: spec.panel, source: spec.input, columns };
}

export function render(spec: FigureSpec, csvText: string): Rendered {
  const table = parseTable(csvText, spec.input);
  const svg = PANELS[spec.panel](table, { title: spec.title, marker: spec.marker });
  return { svg, sidecar: sidecarFor(spec, table) };
}
