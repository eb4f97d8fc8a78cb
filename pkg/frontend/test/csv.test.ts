import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import {
  HISTORY_COLUMNS,
  SchemaError,
  parseCsv,
  parseHistory,
  parseStudy,
} from "../src/csv.js";

const DATA = join(__dirname, "..", "testdata");

function golden(name: string): string {
  return readFileSync(join(DATA, name), "utf8");
}

describe("history parsing", () => {
  it("reads the golden completed run", () => {
    const rows = parseHistory(golden("history.csv"));
    expect(rows.length).toBeGreaterThan(3);
    expect(rows[0].t).toBe(0);
    expect(rows.every((r) => r.abort === "")).toBe(true);
    expect(rows.every((r) => Number.isFinite(r.norm_h2l))).toBe(true);
  });

  it("reads the golden aborted run with the abort flag", () => {
    const rows = parseHistory(golden("history_abort.csv"));
    const last = rows[rows.length - 1];
    expect(last.abort).toBe("magnetic_floor");
    expect(rows.slice(0, -1).every((r) => r.abort === "")).toBe(true);
  });

  it("rejects a corrupted schema line", () => {
    const bad = golden("history.csv").replace(
      "# schema=mhdlab.history.v1",
      "# schema=mhdlab.history.v9",
    );
    expect(() => parseHistory(bad)).toThrow(SchemaError);
  });

  it("rejects a missing schema line", () => {
    const bad = golden("history.csv").split("\n").slice(1).join("\n");
    expect(() => parseHistory(bad)).toThrow(/schema/);
  });

  it("rejects unknown columns", () => {
    const lines = golden("history.csv").split("\n");
    lines[1] = lines[1].replace("norm_h2l", "norm_h3l");
    expect(() => parseHistory(lines.join("\n"))).toThrow(/unknown/);
  });

  it("rejects extra columns", () => {
    const lines = golden("history.csv").split("\n");
    lines[1] += ",surprise";
    expect(() => parseHistory(lines.join("\n"))).toThrow(SchemaError);
  });

  it("rejects non-numeric cells", () => {
    const lines = golden("history.csv").split("\n");
    lines[2] = lines[2].replace(/^[^,]+/, "soon");
    expect(() => parseHistory(lines.join("\n"))).toThrow(/non-numeric/);
  });
});

describe("study parsing", () => {
  it("reads the golden grid study", () => {
    const rows = parseStudy(golden("study_grid.csv"));
    const axes = new Set(rows.map((r) => r.axis));
    expect(axes).toEqual(new Set(["dy", "dt", "dx"]));
    expect(rows[0].observedOrder).toBeNull(); // first ladder entry
  });

  it("reads the golden epsilon study", () => {
    const rows = parseStudy(golden("study_epsilon.csv"));
    expect(rows.every((r) => r.axis === "epsilon")).toBe(true);
  });

  it("rejects the wrong schema family", () => {
    const swapped = golden("study_grid.csv").replace(
      "mhdlab.study.grid.v1",
      "mhdlab.history.v1",
    );
    expect(() => parseStudy(swapped)).toThrow(SchemaError);
  });
});

describe("generic parser", () => {
  it("checks exact column order", () => {
    const text = "# schema=s\nb,a\n1,2\n";
    expect(() => parseCsv(text, "s", ["a", "b"])).toThrow(/misplaced/);
  });

  it("exposes the frozen history column tuple", () => {
    expect(HISTORY_COLUMNS[0]).toBe("t");
    expect(HISTORY_COLUMNS[HISTORY_COLUMNS.length - 1]).toBe("abort");
  });
});
