import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { groupBy, parseCsv } from "../src/csv";
import { EmptyCsv, MissingColumn } from "../src/errors";
import { FigureSpec, loadSeries, render } from "../src/figures";
import { main, renderAll } from "../src/cli";

const FIXTURES = path.join(__dirname, "..", "fixtures");

let workDir: string;

beforeAll(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "render-figs-"));
});

afterAll(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

describe("csv parsing", () => {
  it("keeps the provenance comment and the header", () => {
    const table = parseCsv(fs.readFileSync(path.join(FIXTURES, "fig3.csv"), "utf-8"));
    expect(table.comment).toMatch(/^# impalloc /);
    expect(table.columns).toEqual(["series", "T", "rwre"]);
    expect(table.rows.length).toBe(7 * 81);
  });

  it("handles quoted fields with embedded commas", () => {
    const table = parseCsv('a,b\n"x,y",2\n');
    expect(table.rows[0].a).toBe("x,y");
  });
});

describe("renderAll on the bundled benchmark CSVs", () => {
  it("emits five SVG files", () => {
    const outDir = path.join(workDir, "all");
    const rendered = renderAll(FIXTURES, outDir);
    expect(rendered.length).toBe(5);
    for (const name of ["fig1", "fig2", "fig3", "fig4", "fig5"]) {
      const file = path.join(outDir, `${name}.svg`);
      expect(fs.existsSync(file)).toBe(true);
      const body = fs.readFileSync(file, "utf-8");
      expect(body.startsWith("<svg ")).toBe(true);
      expect(body.trimEnd().endsWith("</svg>")).toBe(true);
    }
  });

  it("is byte-stable across two runs", () => {
    const a = path.join(workDir, "runA");
    const b = path.join(workDir, "runB");
    renderAll(FIXTURES, a);
    renderAll(FIXTURES, b);
    for (const name of ["fig1", "fig2", "fig3", "fig4", "fig5"]) {
      const bufA = fs.readFileSync(path.join(a, `${name}.svg`));
      const bufB = fs.readFileSync(path.join(b, `${name}.svg`));
      expect(bufA.equals(bufB)).toBe(true);
    }
  });

  it("cli entry point renders and reports the files", () => {
    const outDir = path.join(workDir, "cli");
    const code = main(["--in", FIXTURES, "--out", outDir]);
    expect(code).toBe(0);
    expect(fs.readdirSync(outDir).sort()).toEqual(
      ["fig1.svg", "fig2.svg", "fig3.svg", "fig4.svg", "fig5.svg"],
    );
  });

  it("cli rejects bad usage and empty input dirs", () => {
    expect(main(["--in", FIXTURES])).toBe(2);
    const emptyDir = path.join(workDir, "none");
    fs.mkdirSync(emptyDir, { recursive: true });
    expect(main(["--in", emptyDir, "--out", path.join(workDir, "x")])).toBe(3);
  });
});

describe("budget-sweep figure", () => {
  it("holds 7 series, each nonincreasing in the budget", () => {
    const table = parseCsv(fs.readFileSync(path.join(FIXTURES, "fig3.csv"), "utf-8"));
    const grouped = groupBy(table.rows, "series");
    expect(grouped.size).toBe(7);
    for (const rows of grouped.values()) {
      const sorted = [...rows].sort((r, s) => Number(r.T) - Number(s.T));
      const errs = sorted.map((r) => Number(r.rwre));
      for (let i = 1; i < errs.length; i++) {
        expect(errs[i]).toBeLessThanOrEqual(errs[i - 1] + 1e-9);
      }
    }
  });

  it("draws one polyline per series", () => {
    const outDir = path.join(workDir, "series");
    renderAll(FIXTURES, outDir);
    const svg = fs.readFileSync(path.join(outDir, "fig3.svg"), "utf-8");
    expect((svg.match(/<polyline /g) ?? []).length).toBe(7);
  });
});

describe("log-scale figure", () => {
  it("renders tiny positive values with finite coordinates", () => {
    const outDir = path.join(workDir, "log");
    renderAll(FIXTURES, outDir);
    const svg = fs.readFileSync(path.join(outDir, "fig5.svg"), "utf-8");
    expect(svg).not.toContain("NaN");
    expect(svg).not.toContain("Infinity");
    expect(svg).toContain("1e-");
  });
});

describe("error handling", () => {
  const base: Omit<FigureSpec, "inputCsv"> = {
    kind: "rwre_vs_T",
    seriesColumn: "series",
    xColumn: "T",
    yColumn: "rwre",
    output: "",
    title: "t",
    xLabel: "x",
    yLabel: "y",
  };

  it("raises EmptyCsv when only a header is present", () => {
    const file = path.join(workDir, "empty.csv");
    fs.writeFileSync(file, "series,T,rwre\n");
    expect(() => loadSeries({ ...base, inputCsv: file })).toThrow(EmptyCsv);
  });

  it("raises MissingColumn for an absent column", () => {
    const file = path.join(workDir, "missing.csv");
    fs.writeFileSync(file, "series,T\nA,1\n");
    expect(() => loadSeries({ ...base, inputCsv: file })).toThrow(MissingColumn);
  });

  it("render writes the requested output path", () => {
    const file = path.join(workDir, "mini.csv");
    fs.writeFileSync(file, "series,T,rwre\nA,0,1\nA,1,0.5\nB,0,1\nB,1,0.25\n");
    const out = path.join(workDir, "mini.svg");
    render({ ...base, inputCsv: file, output: out });
    expect(fs.existsSync(out)).toBe(true);
  });
});
