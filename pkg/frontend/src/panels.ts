/** The four panel builders: schema-tagged CSV in, complete SVG string out. */

import { DataError, Table, column, requireColumns } from "./csv.js";
import {
  Frame,
  HEIGHT,
  MARGIN,
  Series,
  WIDTH,
  linearScale,
  logScale,
  logTicks,
  niceTicks,
  panelSvg,
} from "./svg.js";

export type PanelType =
  | "eigenstate-histogram"
  | "energy-vs-temperature"
  | "inverse-gap-vs-size"
  | "entropy-vs-depth";

export type Marker = "circle" | "diamond" | "square";

export interface PanelOptions {
  title: string;
  /** marker for the simulated series; circle = noiseless, diamond = noisy, square = mitigated */
  marker: Marker;
}

// series colors follow the marker convention
const MARKER_COLOR: Record<Marker, string> = {
  circle: "#2a6db8",
  diamond: "#3a9d5c",
  square: "#c43d3d",
};
const EXACT_COLOR = "#1d1a16";

const X0 = MARGIN.left;
const X1 = WIDTH - MARGIN.right;
const Y0 = HEIGHT - MARGIN.bottom;
const Y1 = MARGIN.top;

function finiteExtent(values: number[], source: string): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) {
    throw new DataError(`${source}: no finite values to plot`);
  }
  return [Math.min(...finite), Math.max(...finite)];
}

function pad(lo: number, hi: number): [number, number] {
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - 0.06 * span, hi + 0.06 * span];
}

export function eigenstateHistogram(table: Table, opts: PanelOptions): string {
  requireColumns(table, ["mu", "E_mu", "p_mu_exact", "p_mu_sim", "stderr"], "eigenstates");
  const mu = column(table, "mu");
  const exact = column(table, "p_mu_exact");
  const sim = column(table, "p_mu_sim");
  const err = column(table, "stderr");
  const [, pMax] = finiteExtent(exact.concat(sim), "eigenstates");
  const xs = linearScale(mu[0] - 0.5, mu[mu.length - 1] + 0.5, X0, X1);
  const ys = linearScale(0, 1.1 * pMax, Y0, Y1);
  const everyState = mu.length <= 16;
  const frame: Frame = {
    xScale: xs,
    yScale: ys,
    xTicks: everyState ? mu : niceTicks(mu[0], mu[mu.length - 1]),
    yTicks: niceTicks(0, 1.1 * pMax),
    xLabel: "eigenstate index",
    yLabel: "occupation probability",
    title: opts.title,
  };
  const series: Series[] = [
    {
      points: mu.map((m, i) => [xs(m), ys(exact[i])] as [number, number]),
      color: EXACT_COLOR,
      line: "dashed",
      label: "exact Gibbs",
    },
    {
      points: mu.map((m, i) => [xs(m), ys(sim[i])] as [number, number]),
      color: MARKER_COLOR[opts.marker],
      line: "none",
      marker: opts.marker,
      // stderr is in probability units; convert to pixel half-lengths
      errors: err.map((e) => Math.abs(ys(e) - ys(0))),
      label: "simulated",
    },
  ];
  return panelSvg(frame, series);
}

export function energyVsTemperature(table: Table, opts: PanelOptions): string {
  requireColumns(table, ["beta", "energy"], "energy curve");
  const beta = column(table, "beta");
  const energy = column(table, "energy");
  const [bLo, bHi] = pad(...finiteExtent(beta, "beta"));
  const [eLo, eHi] = pad(...finiteExtent(energy, "energy"));
  const xs = linearScale(bLo, bHi, X0, X1);
  const ys = linearScale(eLo, eHi, Y0, Y1);
  const frame: Frame = {
    xScale: xs,
    yScale: ys,
    xTicks: niceTicks(bLo, bHi),
    yTicks: niceTicks(eLo, eHi),
    xLabel: "inverse temperature",
    yLabel: "thermal energy",
    title: opts.title,
  };
  const series: Series[] = [
    {
      points: beta.map((b, i) => [xs(b), ys(energy[i])] as [number, number]),
      color: EXACT_COLOR,
      line: "dashed",
      label: "exact",
    },
  ];
  return panelSvg(frame, series);
}

export function inverseGapVsSize(table: Table, opts: PanelOptions): string {
  requireColumns(table, ["n", "dim_sector", "gap", "inverse_gap"], "gap table");
  const n = column(table, "n");
  const inv = column(table, "inverse_gap");
  const [nLo, nHi] = pad(...finiteExtent(n, "n"));
  const [iLo, iHi] = pad(...finiteExtent(inv, "inverse_gap"));
  const xs = linearScale(nLo, nHi, X0, X1);
  const ys = linearScale(Math.min(iLo, 0), iHi, Y0, Y1);
  const frame: Frame = {
    xScale: xs,
    yScale: ys,
    xTicks: n,
    yTicks: niceTicks(Math.min(iLo, 0), iHi),
    xLabel: "chain length",
    yLabel: "inverse spectral gap",
    title: opts.title,
  };
  const series: Series[] = [
    {
      points: n.map((v, i) => [xs(v), ys(inv[i])] as [number, number]),
      color: MARKER_COLOR[opts.marker],
      line: "solid",
      marker: opts.marker,
      label: "chain reduction",
    },
  ];
  return panelSvg(frame, series);
}

export function entropyVsDepth(table: Table, opts: PanelOptions): string {
  requireColumns(table, ["d", "xi", "S_mode1", "S_mode3_mean", "success_prob"], "scaling table");
  const d = column(table, "d");
  const s1 = column(table, "S_mode1");
  const s3 = column(table, "S_mode3_mean");
  // log-log panel: keep only plottable points, per series
  const usable = (s: number[]) =>
    d.map((v, i) => [v, s[i]] as [number, number]).filter(([x, y]) => x > 0 && y > 0 && Number.isFinite(y));
  const pts1 = usable(s1);
  const pts3 = usable(s3);
  if (pts1.length === 0 && pts3.length === 0) {
    throw new DataError("scaling table: no positive finite entropies to plot");
  }
  const all = pts1.concat(pts3);
  const dLo = Math.min(...all.map(([x]) => x));
  const dHi = Math.max(...all.map(([x]) => x));
  const sLo = Math.min(...all.map(([, y]) => y));
  const sHi = Math.max(...all.map(([, y]) => y));
  const xs = logScale(dLo / 1.2, dHi * 1.2, X0, X1);
  const ys = logScale(sLo / 1.6, sHi * 1.6, Y0, Y1);
  const frame: Frame = {
    xScale: xs,
    yScale: ys,
    xTicks: d.filter((v) => v > 0),
    yTicks: logTicks(sLo / 1.6, sHi * 1.6),
    xLabel: "circuit depth",
    yLabel: "relative entropy to Gibbs",
    title: opts.title,
  };
  const series: Series[] = [];
  if (pts1.length > 0) {
    series.push({
      points: pts1.map(([x, y]) => [xs(x), ys(y)] as [number, number]),
      color: EXACT_COLOR,
      line: "dashed",
      label: "averaged circuit",
    });
  }
  if (pts3.length > 0) {
    series.push({
      points: pts3.map(([x, y]) => [xs(x), ys(y)] as [number, number]),
      color: MARKER_COLOR[opts.marker],
      line: "none",
      marker: opts.marker,
      label: "per-angle-set mean",
    });
  }
  return panelSvg(frame, series);
}

export const PANELS: Record<PanelType, (table: Table, opts: PanelOptions) => string> = {
  "eigenstate-histogram": eigenstateHistogram,
  "energy-vs-temperature": energyVsTemperature,
  "inverse-gap-vs-size": inverseGapVsSize,
  "entropy-vs-depth": entropyVsDepth,
};
