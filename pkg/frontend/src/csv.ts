/** Reader for the simulator's schema-tagged CSV files. */

export const SCHEMA_LINE = "# schema=1";

/** Raised for any contract violation in an input file or figure spec. */
export class DataError extends Error {}

export interface Table {
  /** column names in file order */
  header: string[];
  /** parsed values, column name -> array; non-finite values survive as-is */
  columns: Map<string, number[]>;
  /** number of data rows */
  length: number;
}

// The producer writes Python float reprs; cover its non-finite spellings.
function parseCell(cell: string, where: string): number {
  switch (cell) {
    case "inf":
      return Infinity;
    case "-inf":
      return -Infinity;
    case "nan":
      return NaN;
  }
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new DataError(`${where}: cell "${cell}" is not a number`);
  }
  return value;
}

export function parseTable(text: string, source: string): Table {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0 || lines[0] !== SCHEMA_LINE) {
    const found = lines.length === 0 ? "empty file" : `"${lines[0]}"`;
    throw new DataError(`${source}: expected first line "${SCHEMA_LINE}", got ${found}`);
  }
  if (lines.length < 2) {
    throw new DataError(`${source}: missing header row`);
  }
  const header = lines[1].split(",");
  if (lines.length < 3) {
    throw new DataError(`${source}: no data rows`);
  }
  const columns = new Map<string, number[]>(header.map((name) => [name, []]));
  for (let i = 2; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new DataError(
        `${source}: row ${i - 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    for (let j = 0; j < header.length; j++) {
      columns.get(header[j])!.push(parseCell(cells[j], `${source} row ${i - 1}`));
    }
  }
  return { header, columns, length: lines.length - 2 };
}

export function requireColumns(table: Table, names: string[], source: string): void {
  const missing = names.filter((name) => !table.columns.has(name));
  if (missing.length > 0) {
    throw new DataError(
      `${source}: missing columns ${missing.join(", ")} (have ${table.header.join(", ")})`,
    );
  }
}

export function column(table: Table, name: string): number[] {
  const values = table.columns.get(name);
  if (values === undefined) {
    throw new DataError(`column ${name} not present`);
  }
  return values;
}
