/** Deterministic SVG building blocks: no timestamps, fixed precision, fixed
 * palette, so identical inputs render byte-identical files. */

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
];

export function coord(x: number): string {
  return x.toFixed(2);
}

export function labelNumber(x: number): string {
  if (x === 0) return "0";
  if (Number.isInteger(x) && Math.abs(x) < 1e6) return String(x);
  const s = x.toPrecision(4);
  return s.includes("e") ? s : s.replace(/\.?0+$/, "");
}

export interface Scale {
  (value: number): number;
  ticks: number[];
  tickLabel(value: number): string;
}

function niceStep(span: number, count: number): number {
  const raw = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export function linearScale(min: number, max: number, lo: number, hi: number, count = 6): Scale {
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const step = niceStep(max - min, count);
  const first = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= max + 1e-9 * step; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  const fn = ((value: number) => lo + ((value - min) / (max - min)) * (hi - lo)) as Scale;
  fn.ticks = ticks;
  fn.tickLabel = labelNumber;
  return fn;
}

export function log10Scale(min: number, max: number, lo: number, hi: number, count = 6): Scale {
  const eMin = Math.floor(Math.log10(min));
  const eMax = Math.ceil(Math.log10(max));
  const span = Math.max(eMax - eMin, 1);
  const stride = Math.max(1, Math.ceil(span / (count - 1)));
  const ticks: number[] = [];
  for (let e = eMax; e >= eMin; e -= stride) {
    ticks.push(Math.pow(10, e));
  }
  ticks.reverse();
  const fn = ((value: number) =>
    lo + ((Math.log10(value) - eMin) / (eMax - eMin)) * (hi - lo)) as Scale;
  fn.ticks = ticks;
  fn.tickLabel = (v: number) => {
    const e = Math.round(Math.log10(v));
    return e === 0 ? "1" : `1e${e}`;
  };
  return fn;
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function polyline(points: [number, number][], color: string, extra = ""): string {
  const path = points.map(([x, y]) => `${coord(x)},${coord(y)}`).join(" ");
  return `<polyline fill="none" stroke="${color}" stroke-width="1.5"${extra} points="${path}"/>`;
}

export function circleMarkers(points: [number, number][], color: string): string {
  return points
    .map(([x, y]) => `<circle cx="${coord(x)}" cy="${coord(y)}" r="2.5" fill="${color}"/>`)
    .join("");
}

export function text(
  x: number,
  y: number,
  content: string,
  anchor: "start" | "middle" | "end" = "start",
  size = 11,
  extra = "",
): string {
  return (
    `<text x="${coord(x)}" y="${coord(y)}" text-anchor="${anchor}" ` +
    `font-family="Helvetica,Arial,sans-serif" font-size="${size}"${extra}>` +
    `${escapeXml(content)}</text>`
  );
}
