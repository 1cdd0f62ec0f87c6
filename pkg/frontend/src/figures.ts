/** Chart assembly: one figure spec in, one deterministic SVG string out. */

import * as fs from "fs";

import { groupBy, parseCsv } from "./csv";
import { EmptyCsv, MissingColumn } from "./errors";
import {
  PALETTE,
  Scale,
  circleMarkers,
  coord,
  linearScale,
  log10Scale,
  polyline,
  text,
} from "./svg";

export type FigureKind = "broken_line" | "rwre_vs_T" | "rwre_vs_T_log" | "rwre_vs_delta";

export interface FigureSpec {
  inputCsv: string;
  kind: FigureKind;
  seriesColumn: string;
  xColumn: string;
  yColumn: string;
  output: string;
  title: string;
  xLabel: string;
  yLabel: string;
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 64, right: 20, top: 34, bottom: 44 };

export interface Series {
  name: string;
  points: [number, number][]; // data coordinates, CSV order
}

export function loadSeries(spec: FigureSpec): Series[] {
  const table = parseCsv(fs.readFileSync(spec.inputCsv, "utf-8"));
  for (const column of [spec.seriesColumn, spec.xColumn, spec.yColumn]) {
    if (!table.columns.includes(column)) {
      throw new MissingColumn(column, table.columns);
    }
  }
  if (table.rows.length === 0) {
    throw new EmptyCsv(spec.inputCsv);
  }
  const grouped = groupBy(table.rows, spec.seriesColumn);
  const series: Series[] = [];
  for (const [name, rows] of grouped) {
    const points = rows
      .map((r) => [Number(r[spec.xColumn]), Number(r[spec.yColumn])] as [number, number])
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
    if (points.length > 0) {
      series.push({ name, points });
    }
  }
  if (series.length === 0) {
    throw new EmptyCsv(spec.inputCsv);
  }
  return series;
}

function dataExtent(series: Series[], axis: 0 | 1, positiveOnly: boolean): [number, number] {
  let min = Infinity;
  let max = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      const v = p[axis];
      if (positiveOnly && v <= 0) continue;
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  return [min, max];
}

export function renderSvg(spec: FigureSpec, series: Series[]): string {
  const logY = spec.kind === "rwre_vs_T_log";
  const [xMin, xMax] = dataExtent(series, 0, false);
  const [yMin, yMax] = dataExtent(series, 1, logY);

  const x = linearScale(xMin, xMax, MARGIN.left, WIDTH - MARGIN.right);
  const y: Scale = logY
    ? log10Scale(yMin, yMax, HEIGHT - MARGIN.bottom, MARGIN.top)
    : linearScale(Math.min(yMin, 0), yMax, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(text(WIDTH / 2, 18, spec.title, "middle", 13, ' font-weight="bold"'));

  // axes
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<line x1="${coord(x0)}" y1="${coord(y0)}" x2="${coord(x1)}" y2="${coord(y0)}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${coord(x0)}" y1="${coord(y0)}" x2="${coord(x0)}" y2="${coord(y1)}" stroke="black"/>`,
  );
  for (const t of x.ticks) {
    const px = x(t);
    parts.push(
      `<line x1="${coord(px)}" y1="${coord(y0)}" x2="${coord(px)}" y2="${coord(y0 + 4)}" stroke="black"/>`,
    );
    parts.push(text(px, y0 + 17, x.tickLabel(t), "middle", 10));
  }
  for (const t of y.ticks) {
    const py = y(t);
    parts.push(
      `<line x1="${coord(x0 - 4)}" y1="${coord(py)}" x2="${coord(x0)}" y2="${coord(py)}" stroke="black"/>`,
    );
    parts.push(
      `<line x1="${coord(x0)}" y1="${coord(py)}" x2="${coord(x1)}" y2="${coord(py)}" stroke="#dddddd" stroke-dasharray="3,3"/>`,
    );
    parts.push(text(x0 - 7, py + 3, y.tickLabel(t), "end", 10));
  }
  parts.push(text((x0 + x1) / 2, HEIGHT - 10, spec.xLabel, "middle", 11));
  parts.push(
    text(16, (y0 + y1) / 2, spec.yLabel, "middle", 11, ` transform="rotate(-90 16 ${coord((y0 + y1) / 2)})"`),
  );

  // series
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points.map(([px, py]) => [x(px), y(py)] as [number, number]);
    parts.push(polyline(pts, color));
    if (spec.kind === "broken_line") {
      parts.push(circleMarkers(pts, color));
    }
  });

  // legend, top right inside the plot area
  const legendX = x1 - 150;
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = y1 + 10 + i * 15;
    parts.push(
      `<line x1="${coord(legendX)}" y1="${coord(ly - 3)}" x2="${coord(legendX + 18)}" y2="${coord(ly - 3)}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(text(legendX + 24, ly, s.name, "start", 10));
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function render(spec: FigureSpec): string {
  const svg = renderSvg(spec, loadSeries(spec));
  fs.writeFileSync(spec.output, svg);
  return spec.output;
}
