import { Table, numericColumn, prefixedColumns, stringColumn } from "./csv";
import {
  HEIGHT,
  MARGIN,
  PALETTE,
  SvgCanvas,
  WIDTH,
  axes,
  colorRamp,
  fmt,
  legend,
  linearScale,
  logScale,
} from "./svg";

export type FigureKind = "pareto" | "bands" | "ecdf" | "risk-trace" | "heatmap";

export interface FigureOptions {
  /** bands: shade +- sample std instead of the default RMS band */
  useStd?: boolean;
}

const PLOT = { x0: MARGIN.left, x1: WIDTH - MARGIN.right, y0: HEIGHT - MARGIN.bottom, y1: MARGIN.top };

function uniqueInOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

function positiveFloor(values: number[]): number {
  let lo = Infinity;
  for (const v of values) if (Number.isFinite(v) && v > 0 && v < lo) lo = v;
  return Number.isFinite(lo) ? lo : 1e-12;
}

/** Mean-suboptimality curves with shaded deviation bands, one per method. */
export function renderBands(table: Table, opts: FigureOptions = {}): string {
  const methods = stringColumn(table, "method");
  const k = numericColumn(table, "k");
  const mean = numericColumn(table, "mean");
  const band = numericColumn(table, opts.useStd ? "std" : "rms");
  const names = uniqueInOrder(methods);
  const yLo = positiveFloor(mean) * 0.5;
  const yHi = Math.max(...mean.map((m, i) => m + band[i])) * 1.5;
  const sx = linearScale(Math.min(...k), Math.max(...k), PLOT.x0, PLOT.x1);
  const sy = logScale(yLo, yHi, PLOT.y0, PLOT.y1);
  const canvas = new SvgCanvas();
  names.forEach((name, mi) => {
    const idx = methods.map((m, i) => (m === name ? i : -1)).filter((i) => i >= 0);
    const color = PALETTE[mi % PALETTE.length];
    const upper = idx.map((i): [number, number] => [sx(k[i]), sy(Math.max(mean[i] + band[i], yLo))]);
    const lower = idx
      .slice()
      .reverse()
      .map((i): [number, number] => [sx(k[i]), sy(Math.max(mean[i] - band[i], yLo))]);
    canvas.polygon(upper.concat(lower), color);
    canvas.polyline(
      idx.map((i): [number, number] => [sx(k[i]), sy(Math.max(mean[i], yLo))]),
      color
    );
  });
  axes(canvas, sx, sy, "iteration k", "suboptimality");
  legend(canvas, names.map((n) => `${n} (±${opts.useStd ? "std" : "rms"})`), names.map((_, i) => PALETTE[i % PALETTE.length]));
  return canvas.render();
}

/** Right-continuous ECDF of the final-iterate suboptimality per method. */
export function renderEcdf(table: Table): string {
  const methods = stringColumn(table, "method");
  const subopt = numericColumn(table, "subopt");
  const names = uniqueInOrder(methods);
  const finite = subopt.filter(Number.isFinite);
  const sx = linearScale(0, Math.max(...finite) * 1.05, PLOT.x0, PLOT.x1);
  const sy = linearScale(0, 1, PLOT.y0, PLOT.y1);
  const canvas = new SvgCanvas();
  names.forEach((name, mi) => {
    const vals = methods
      .map((m, i) => (m === name ? subopt[i] : NaN))
      .filter(Number.isFinite)
      .sort((a, b) => a - b);
    const pts: Array<[number, number]> = [[sx(0), sy(0)]];
    vals.forEach((v, i) => {
      pts.push([sx(v), sy(i / vals.length)]);
      pts.push([sx(v), sy((i + 1) / vals.length)]);
    });
    pts.push([sx.ticks.length ? sx(Math.max(...finite) * 1.05) : PLOT.x1, sy(1)]);
    canvas.polyline(pts, PALETTE[mi % PALETTE.length]);
  });
  axes(canvas, sx, sy, "final suboptimality", "cumulative fraction");
  legend(canvas, names, names.map((_, i) => PALETTE[i % PALETTE.length]));
  return canvas.render();
}

/** Empirical entropic-risk traces over iterations, one curve per method. */
export function renderRiskTrace(table: Table): string {
  const methods = stringColumn(table, "method");
  const k = numericColumn(table, "k");
  const risk = numericColumn(table, "risk");
  numericColumn(table, "theta"); // schema check
  const names = uniqueInOrder(methods);
  const finite = risk.filter((r) => Number.isFinite(r) && r > 0);
  const sx = linearScale(Math.min(...k), Math.max(...k), PLOT.x0, PLOT.x1);
  const sy = logScale(positiveFloor(finite) * 0.5, Math.max(...finite) * 1.5, PLOT.y0, PLOT.y1);
  const canvas = new SvgCanvas();
  names.forEach((name, mi) => {
    const pts: Array<[number, number]> = [];
    methods.forEach((m, i) => {
      if (m === name && Number.isFinite(risk[i]) && risk[i] > 0) pts.push([sx(k[i]), sy(risk[i])]);
    });
    canvas.polyline(pts, PALETTE[mi % PALETTE.length]);
  });
  axes(canvas, sx, sy, "iteration k", "empirical entropic risk");
  legend(canvas, names, names.map((_, i) => PALETTE[i % PALETTE.length]));
  return canvas.render();
}

function lowerEnvelope(x: number[], y: number[], bins = 60): Array<[number, number]> {
  const pairs = x
    .map((xv, i): [number, number] => [xv, y[i]])
    .filter(([xv, yv]) => Number.isFinite(xv) && Number.isFinite(yv));
  if (pairs.length === 0) return [];
  const lo = Math.min(...pairs.map((p) => p[0]));
  const hi = Math.max(...pairs.map((p) => p[0]));
  const best = new Map<number, number>();
  for (const [xv, yv] of pairs) {
    const b = Math.min(bins - 1, Math.floor(((xv - lo) / (hi - lo || 1)) * bins));
    const cur = best.get(b);
    if (cur === undefined || yv < cur) best.set(b, yv);
  }
  return Array.from(best.entries())
    .sort((a, b) => a[0] - b[0])
    .map(([b, yv]): [number, number] => [lo + ((b + 0.5) / bins) * (hi - lo), yv]);
}

/** Rate-versus-risk Pareto curves from the design-sweep CSV. */
export function renderPareto(table: Table): string {
  const rho = numericColumn(table, "rho");
  const riskCols = prefixedColumns(table, "risk_theta_");
  const series = riskCols.concat(["evar_exact", "evar_bound"]);
  if (riskCols.length === 0) {
    throw new Error("missing column: risk_theta_*");
  }
  const stable = rho.map((r) => r < 1);
  const canvas = new SvgCanvas();
  const envelopes = series.map((name) => {
    const y = numericColumn(table, name).map((v, i) => (stable[i] ? v : NaN));
    return lowerEnvelope(rho.map((r, i) => (stable[i] ? r : NaN)), y);
  });
  const allY = envelopes.flat().map(([, v]) => v);
  const sx = linearScale(0, 1, PLOT.x0, PLOT.x1);
  const sy = logScale(positiveFloor(allY) * 0.5, Math.max(...allY) * 1.5, PLOT.y0, PLOT.y1);
  envelopes.forEach((env, i) => {
    canvas.polyline(env.map(([x, y]): [number, number] => [sx(x), sy(Math.max(y, 1e-300))]), PALETTE[i % PALETTE.length]);
  });
  axes(canvas, sx, sy, "convergence rate", "risk / EV@R");
  legend(canvas, series, series.map((_, i) => PALETTE[i % PALETTE.length]));
  return canvas.render();
}

/** Two-panel scatter heatmap over the admissible set: EV@R bound and relative rate. */
export function renderHeatmap(table: Table): string {
  const alpha = numericColumn(table, "alpha");
  const beta = numericColumn(table, "beta");
  const gamma = numericColumn(table, "gamma");
  const rateRel = numericColumn(table, "rate_rel");
  const evar = numericColumn(table, "evar_bound");
  const keep = alpha.map((_, i) => gamma[i] > 0 && Number.isFinite(evar[i]));
  const ratio = beta.map((b, i) => (keep[i] ? b / gamma[i] : NaN));
  const xs = alpha.filter((_, i) => keep[i]);
  const ys = ratio.filter(Number.isFinite);
  const canvas = new SvgCanvas(2 * WIDTH, HEIGHT);
  const panels: Array<{ label: string; values: number[]; xoff: number }> = [
    { label: "EV@R bound", values: evar, xoff: 0 },
    { label: "relative rate", values: rateRel, xoff: WIDTH },
  ];
  for (const panel of panels) {
    const vals = panel.values.filter((v, i) => keep[i] && Number.isFinite(v));
    const lo = Math.min(...vals);
    const hi = Math.max(...vals);
    const sx = linearScale(Math.min(...xs), Math.max(...xs), PLOT.x0 + panel.xoff, PLOT.x1 + panel.xoff);
    const sy = linearScale(Math.min(...ys), Math.max(...ys), PLOT.y0, PLOT.y1);
    alpha.forEach((a, i) => {
      if (!keep[i] || !Number.isFinite(panel.values[i])) return;
      const t = hi > lo ? (panel.values[i] - lo) / (hi - lo) : 0.5;
      canvas.circle(sx(a), sy(ratio[i]), 3, colorRamp(t));
    });
    axes(canvas, sx, sy, "stepsize", "beta/gamma", {
      x0: PLOT.x0 + panel.xoff,
      x1: PLOT.x1 + panel.xoff,
      y0: PLOT.y0,
      y1: PLOT.y1,
    });
    canvas.text(panel.xoff + WIDTH / 2, 16, `${panel.label} (${fmt(lo)} to ${fmt(hi)})`);
  }
  return canvas.render();
}

export function render(kind: FigureKind, tables: Table[], opts: FigureOptions = {}): string {
  switch (kind) {
    case "bands":
      return renderBands(tables[0], opts);
    case "ecdf":
      return renderEcdf(tables[0]);
    case "risk-trace":
      return renderRiskTrace(tables[0]);
    case "pareto":
      return renderPareto(tables[0]);
    case "heatmap":
      return renderHeatmap(tables[0]);
    default:
      throw new Error(`unknown figure kind: ${kind}`);
  }
}
