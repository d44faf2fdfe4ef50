import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { column, parseTable } from "../src/csv.js";
import { render } from "../src/render.js";
import { FigureSpec, parseSpec } from "../src/spec.js";

const ROOT = fileURLToPath(new URL("..", import.meta.url));
const FIXTURES = join(ROOT, "fixtures");
const PRESETS = join(ROOT, "presets");

function fixture(...parts: string[]): string {
  return readFileSync(join(FIXTURES, ...parts), "utf8");
}

function renderPreset(name: string) {
  const spec = parseSpec(readFileSync(join(PRESETS, name), "utf8"), name);
  const csv = readFileSync(join(PRESETS, spec.input), "utf8");
  return { spec, csv, out: render(spec, csv) };
}

describe("sidecar pass-through", () => {
  // the sidecar must be a pure projection of the CSV: same columns, same numbers
  for (const run of ["fig2-ergodic", "fig2-universal"]) {
    it(`matches the ${run} eigenstate table exactly`, () => {
      const text = fixture(run, "eigenstates.csv");
      const table = parseTable(text, run);
      const spec: FigureSpec = {
        panel: "eigenstate-histogram",
        input: `${run}/eigenstates.csv`,
        title: "",
        marker: "circle",
      };
      const { sidecar } = render(spec, text);
      expect(sidecar.schema).toBe(1);
      expect(sidecar.panel).toBe("eigenstate-histogram");
      expect(sidecar.source).toBe(spec.input);
      expect(Object.keys(sidecar.columns)).toEqual(table.header);
      for (const name of table.header) {
        expect(sidecar.columns[name]).toEqual(column(table, name));
      }
    });
  }

  it("survives a JSON round trip without losing a digit", () => {
    const text = fixture("fig2-ergodic", "eigenstates.csv");
    const table = parseTable(text, "fig2-ergodic");
    const spec = parseSpec(readFileSync(join(PRESETS, "fig2a-left.json"), "utf8"), "fig2a-left");
    const { sidecar } = render(spec, text);
    const back = JSON.parse(JSON.stringify(sidecar));
    for (const name of table.header) {
      expect(back.columns[name]).toEqual(column(table, name));
    }
  });

  it("maps non-finite values to null, leaving the rest exact", () => {
    const text = fixture("figs3", "scaling.csv");
    const table = parseTable(text, "figs3");
    const spec: FigureSpec = { panel: "entropy-vs-depth", input: "scaling.csv", title: "", marker: "square" };
    const { sidecar } = render(spec, text);
    const s3 = column(table, "S_mode3_mean");
    expect(s3.some((v) => !Number.isFinite(v))).toBe(true);
    sidecar.columns.S_mode3_mean.forEach((v, i) => {
      if (Number.isFinite(s3[i])) {
        expect(v).toBe(s3[i]);
      } else {
        expect(v).toBeNull();
      }
    });
    // columns untouched by plotting are still projected
    expect(sidecar.columns.success_prob).toEqual(column(table, "success_prob"));
  });
});

describe("panel rendering from real output files", () => {
  const CASES: Array<[string, string[]]> = [
    ["fig2a-left.json", ["eigenstate-histogram"]],
    ["fig2a-right.json", ["eigenstate-histogram"]],
    ["energy-curve.json", ["energy-vs-temperature"]],
    ["fig1c.json", ["inverse-gap-vs-size"]],
    ["figs3-scaling.json", ["entropy-vs-depth"]],
  ];

  for (const [preset, [panel]] of CASES) {
    it(`${preset} renders a ${panel} panel`, () => {
      const { spec, out } = renderPreset(preset);
      expect(spec.panel).toBe(panel);
      expect(out.svg.startsWith("<svg ")).toBe(true);
      expect(out.svg.trimEnd().endsWith("</svg>")).toBe(true);
      expect(out.svg.length).toBeGreaterThan(800);
    });
  }

  it("covers all four panel types across the shipped presets", () => {
    const panels = new Set(
      readdirSync(PRESETS).map((f) => parseSpec(readFileSync(join(PRESETS, f), "utf8"), f).panel),
    );
    expect([...panels].sort()).toEqual([
      "eigenstate-histogram",
      "energy-vs-temperature",
      "entropy-vs-depth",
      "inverse-gap-vs-size",
    ]);
  });

  it("is deterministic: same inputs, byte-identical outputs", () => {
    for (const [preset] of CASES) {
      const a = renderPreset(preset);
      const b = renderPreset(preset);
      expect(a.out.svg).toBe(b.out.svg);
      expect(JSON.stringify(a.out.sidecar)).toBe(JSON.stringify(b.out.sidecar));
    }
  });
});
