#!/usr/bin/env node
/** gibbsim-figures render --spec spec.json --out fig.svg
 *
 * Writes the SVG panel and, next to it, a .json sidecar holding the exact
 * numeric arrays that were plotted. Exit codes: 0 ok, 2 spec/data error,
 * 1 anything else.
 */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { pathToFileURL } from "node:url";

import { DataError } from "./csv.js";
import { render } from "./render.js";
import { parseSpec } from "./spec.js";

const USAGE = "usage: gibbsim-figures render --spec SPEC.json --out FIG.svg";

function parseArgs(argv: string[]): { specPath: string; outPath: string } {
  if (argv[0] !== "render") {
    throw new DataError(USAGE);
  }
  let specPath: string | undefined;
  let outPath: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new DataError(`missing value for ${flag}\n${USAGE}`);
    }
    if (flag === "--spec") {
      specPath = value;
    } else if (flag === "--out") {
      outPath = value;
    } else {
      throw new DataError(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  if (specPath === undefined || outPath === undefined) {
    throw new DataError(USAGE);
  }
  return { specPath, outPath };
}

export function main(argv: string[]): number {
  try {
    const { specPath, outPath } = parseArgs(argv);
    let specText: string;
    try {
      specText = readFileSync(specPath, "utf8");
    } catch {
      throw new DataError(`spec file not found: ${specPath}`);
    }
    const spec = parseSpec(specText, specPath);
    const csvPath = resolve(dirname(specPath), spec.input);
    let csvText: string;
    try {
      csvText = readFileSync(csvPath, "utf8");
    } catch {
      throw new DataError(`${specPath}: input CSV not found: ${csvPath}`);
    }
    const { svg, sidecar } = render(spec, csvText);
    const sidecarPath = outPath.replace(/\.[^./\\]+$/, "") + ".json";
    if (sidecarPath === outPath) {
      throw new DataError(`--out ${outPath} would collide with its .json sidecar; use another extension`);
    }
    writeFileSync(outPath, svg);
    writeFileSync(sidecarPath, JSON.stringify(sidecar, null, 2) + "\n");
    process.stdout.write(`${outPath}\n${sidecarPath}\n`);
    return 0;
  } catch (e) {
    if (e instanceof DataError) {
      process.stderr.write(`error: ${e.message}\n`);
      return 2;
    }
    process.stderr.write(`unexpected error: ${(e as Error).stack ?? e}\n`);
    return 1;
  }
}

// run directly (not imported by tests); realpath so the npm bin symlink still matches
let entry: string | undefined;
try {
  entry = process.argv[1] === undefined ? undefined : pathToFileURL(realpathSync(process.argv[1])).href;
} catch {
  entry = undefined;
}
if (entry !== undefined && import.meta.url === entry) {
  process.exit(main(process.argv.slice(2)));
}
