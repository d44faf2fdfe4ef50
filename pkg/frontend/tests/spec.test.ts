import { describe, expect, it } from "vitest";

import { DataError } from "../src/csv.js";
import { parseSpec } from "../src/spec.js";

describe("parseSpec", () => {
  it("fills defaults for title and marker", () => {
    const spec = parseSpec('{"panel": "energy-vs-temperature", "input": "e.csv"}', "s");
    expect(spec.title).toBe("");
    expect(spec.marker).toBe("circle");
  });

  it("keeps explicit styling", () => {
    const spec = parseSpec(
      '{"panel": "eigenstate-histogram", "input": "e.csv", "title": "t", "marker": "diamond"}',
      "s",
    );
    expect(spec.marker).toBe("diamond");
    expect(spec.title).toBe("t");
  });

  it("rejects unknown keys", () => {
    expect(() => parseSpec('{"panel": "energy-vs-temperature", "input": "e.csv", "dpi": 300}', "s")).toThrow(
      /unknown keys dpi/,
    );
  });

  it("rejects unknown panels, listing the valid ones", () => {
    expect(() => parseSpec('{"panel": "pie-chart", "input": "e.csv"}', "s")).toThrow(
      /eigenstate-histogram \| energy-vs-temperature/,
    );
  });

  it("rejects bad markers, inputs, and shapes", () => {
    expect(() => parseSpec('{"panel": "energy-vs-temperature", "input": "e.csv", "marker": "star"}', "s")).toThrow(
      /marker must be one of/,
    );
    expect(() => parseSpec('{"panel": "energy-vs-temperature", "input": ""}', "s")).toThrow(/non-empty CSV path/);
    expect(() => parseSpec("[1, 2]", "s")).toThrow(/JSON object/);
    expect(() => parseSpec("not json", "s")).toThrow(DataError);
    expect(() => parseSpec("not json", "s")).toThrow(/not valid JSON/);
  });
});
