/** Figure spec: a small JSON file naming the panel, its input CSV, and styling. */

import { DataError } from "./csv.js";
import { Marker, PanelType, PANELS } from "./panels.js";

export interface FigureSpec {
  panel: PanelType;
  /** CSV path, resolved relative to the spec file */
  input: string;
  title: string;
  marker: Marker;
}

const MARKERS: Marker[] = ["circle", "diamond", "square"];
const KNOWN_KEYS = ["panel", "input", "title", "marker"];

export function parseSpec(text: string, source: string): FigureSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    throw new DataError(`${source}: not valid JSON (${(e as Error).message})`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new DataError(`${source}: spec must be a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  const unknown = Object.keys(obj).filter((k) => !KNOWN_KEYS.includes(k));
  if (unknown.length > 0) {
    throw new DataError(`${source}: unknown keys ${unknown.join(", ")}`);
  }
  const panel = obj.panel;
  if (typeof panel !== "string" || !(panel in PANELS)) {
    throw new DataError(
      `${source}: panel must be one of ${Object.keys(PANELS).join(" | ")}, got ${JSON.stringify(panel)}`,
    );
  }
  if (typeof obj.input !== "string" || obj.input === "") {
    throw new DataError(`${source}: input must be a non-empty CSV path`);
  }
  if (obj.title !== undefined && typeof obj.title !== "string") {
    throw new DataError(`${source}: title must be a string`);
  }
  const marker = obj.marker ?? "circle";
  if (typeof marker !== "string" || !MARKERS.includes(marker as Marker)) {
    throw new DataError(`${source}: marker must be one of ${MARKERS.join(" | ")}`);
  }
  return {
    panel: panel as PanelType,
    input: obj.input,
    title: (obj.title as string | undefined) ?? "",
    marker: marker as Marker,
  };
}
