#!/usr/bin/env node
/** render_figs --in DIR --out DIR
 *
 * Renders the solver's benchmark CSVs (fig1..fig5) found in DIR into SVG
 * charts in the output directory. Exits 2 on usage errors, 1 if any found
 * CSV fails to render, 3 if no input CSV is present.
 */

import * as fs from "fs";
import * as path from "path";

import { FigureKind, FigureSpec, render } from "./figures";

interface Preset {
  kind: FigureKind;
  xColumn: string;
  yColumn: string;
  title: string;
  xLabel: string;
  yLabel: string;
}

export const PRESETS: Record<string, Preset> = {
  fig1: {
    kind: "broken_line",
    xColumn: "class_index",
    yColumn: "length",
    title: "Optimal storage size per class",
    xLabel: "class index",
    yLabel: "storage size (digits)",
  },
  fig2: {
    kind: "rwre_vs_T",
    xColumn: "T",
    yColumn: "rwre",
    title: "Continuous vs rounded error across budgets",
    xLabel: "available storage size T",
    yLabel: "relative weighted reconstruction error",
  },
  fig3: {
    kind: "rwre_vs_T",
    xColumn: "T",
    yColumn: "rwre",
    title: "Error across budgets by importance coefficient",
    xLabel: "available storage size T",
    yLabel: "relative weighted reconstruction error",
  },
  fig4: {
    kind: "rwre_vs_delta",
    xColumn: "delta",
    yColumn: "rwre",
    title: "Error versus compressed storage size",
    xLabel: "compressed storage size",
    yLabel: "relative weighted reconstruction error",
  },
  fig5: {
    kind: "rwre_vs_T_log",
    xColumn: "T",
    yColumn: "rwre",
    title: "Quantification-system error across budgets",
    xLabel: "available storage size T",
    yLabel: "relative weighted reconstruction error (log)",
  },
};

export function renderAll(inDir: string, outDir: string): string[] {
  fs.mkdirSync(outDir, { recursive: true });
  const rendered: string[] = [];
  for (const [name, preset] of Object.entries(PRESETS)) {
    const inputCsv = path.join(inDir, `${name}.csv`);
    if (!fs.existsSync(inputCsv)) {
      continue;
    }
    const spec: FigureSpec = {
      inputCsv,
      output: path.join(outDir, `${name}.svg`),
      seriesColumn: "series",
      ...preset,
    };
    rendered.push(render(spec));
  }
  return rendered;
}

function parseArgs(argv: string[]): { inDir: string; outDir: string } | null {
  let inDir: string | undefined;
  let outDir: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--in") inDir = argv[++i];
    else if (argv[i] === "--out") outDir = argv[++i];
    else return null;
  }
  if (!inDir || !outDir) return null;
  return { inDir, outDir };
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  if (!args) {
    console.error("usage: render_figs --in DIR --out DIR");
    return 2;
  }
  let rendered: string[];
  try {
    rendered = renderAll(args.inDir, args.outDir);
  } catch (err) {
    console.error(`render_figs: ${(err as Error).name}: ${(err as Error).message}`);
    return 1;
  }
  if (rendered.length === 0) {
    console.error(`render_figs: no fig*.csv inputs found in ${args.inDir}`);
    return 3;
  }
  for (const file of rendered) {
    console.log(file);
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
