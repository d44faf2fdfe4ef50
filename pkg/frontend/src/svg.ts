/** Hand-rolled SVG primitives: fixed fonts and sizes so output is deterministic. */

export const WIDTH = 560;
export const HEIGHT = 400;
export const MARGIN = { top: 40, right: 24, bottom: 52, left: 72 };
export const FONT = "Helvetica, Arial, sans-serif";

export type Scale = (value: number) => number;

export function fmt(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`cannot place non-finite coordinate ${x}`);
  }
  // short, reproducible coordinate text
  return String(Number(x.toPrecision(6)));
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo);
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error(`log scale needs positive bounds, got [${lo}, ${hi}]`);
  }
  const a = Math.log10(lo);
  const span = Math.log10(hi) - a || 1;
  return (v) => pxLo + ((Math.log10(v) - a) / span) * (pxHi - pxLo);
}

/** Round tick positions covering [lo, hi]: steps of 1, 2 or 5 times a power of ten. */
export function niceTicks(lo: number, hi: number, want = 6): number[] {
  if (hi <= lo) {
    return [lo];
  }
  const raw = (hi - lo) / Math.max(want - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= want - 1)!;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

/** Powers of ten inside [lo, hi] for logarithmic axes. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo];
}

export function tickLabel(v: number): string {
  const abs = Math.abs(v);
  if (v !== 0 && (abs >= 1e4 || abs < 1e-3)) {
    const e = Math.floor(Math.log10(abs));
    const mantissa = Number((v / Math.pow(10, e)).toPrecision(3));
    return mantissa === 1 ? `1e${e}` : `${mantissa}e${e}`;
  }
  return String(Number(v.toPrecision(6)));
}

export interface Series {
  points: Array<[number, number]>;
  color: string;
  /** none = markers only */
  line: "solid" | "dashed" | "none";
  marker?: "circle" | "diamond" | "square";
  /** optional symmetric error bars, same length as points */
  errors?: number[];
  label: string;
}

function markerShape(kind: "circle" | "diamond" | "square", x: number, y: number, color: string): string {
  const r = 4;
  switch (kind) {
    case "circle":
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${color}" stroke="#1d1a16" stroke-width="0.8"/>`;
    case "square":
      return `<rect x="${fmt(x - r)}" y="${fmt(y - r)}" width="${2 * r}" height="${2 * r}" fill="${color}" stroke="#1d1a16" stroke-width="0.8"/>`;
    case "diamond": {
      const d = `M ${fmt(x)} ${fmt(y - 1.3 * r)} L ${fmt(x + 1.3 * r)} ${fmt(y)} L ${fmt(x)} ${fmt(y + 1.3 * r)} L ${fmt(x - 1.3 * r)} ${fmt(y)} Z`;
      return `<path d="${d}" fill="${color}" stroke="#1d1a16" stroke-width="0.8"/>`;
    }
  }
}

export interface Frame {
  xScale: Scale;
  yScale: Scale;
  xTicks: number[];
  yTicks: number[];
  xLabel: string;
  yLabel: string;
  title: string;
}

/** Assemble a complete panel: frame, axes, series, and a small legend. */
export function panelSvg(frame: Frame, series: Series[]): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="${FONT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  if (frame.title !== "") {
    parts.push(
      `<text x="${fmt((x0 + x1) / 2)}" y="${MARGIN.top - 16}" text-anchor="middle" font-size="15">${esc(frame.title)}</text>`,
    );
  }
  // axes box
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#1d1a16" stroke-width="1"/>`,
  );
  for (const t of frame.xTicks) {
    const px = frame.xScale(t);
    parts.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#1d1a16"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${y0 + 20}" text-anchor="middle" font-size="12">${esc(tickLabel(t))}</text>`,
    );
  }
  for (const t of frame.yTicks) {
    const py = frame.yScale(t);
    parts.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#1d1a16"/>`);
    parts.push(
      `<text x="${x0 - 9}" y="${fmt(py + 4)}" text-anchor="end" font-size="12">${esc(tickLabel(t))}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt((x0 + x1) / 2)}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${esc(frame.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${fmt((y0 + y1) / 2)})">${esc(frame.yLabel)}</text>`,
  );
  for (const s of series) {
    if (s.line !== "none" && s.points.length > 1) {
      const path = s.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      const dash = s.line === "dashed" ? ' stroke-dasharray="7 4"' : "";
      parts.push(
        `<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
      );
    }
    if (s.errors !== undefined) {
      s.points.forEach(([x, y], i) => {
        const half = s.errors![i];
        if (half > 0) {
          parts.push(
            `<line x1="${fmt(x)}" y1="${fmt(y - half)}" x2="${fmt(x)}" y2="${fmt(y + half)}" stroke="${s.color}" stroke-width="1.2"/>`,
          );
        }
      });
    }
    if (s.marker !== undefined) {
      for (const [x, y] of s.points) {
        parts.push(markerShape(s.marker, x, y, s.color));
      }
    }
  }
  // legend, top-right inside the frame
  series.forEach((s, i) => {
    const ly = y1 + 16 + 18 * i;
    const lx = x1 - 150;
    if (s.line !== "none") {
      const dash = s.line === "dashed" ? ' stroke-dasharray="7 4"' : "";
      parts.push(
        `<line x1="${lx}" y1="${fmt(ly - 4)}" x2="${lx + 26}" y2="${fmt(ly - 4)}" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
      );
    }
    if (s.marker !== undefined) {
      parts.push(markerShape(s.marker, lx + 13, ly - 4, s.color));
    }
    parts.push(`<text x="${lx + 32}" y="${fmt(ly)}" font-size="12">${esc(s.label)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
