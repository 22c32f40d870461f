/** Minimal deterministic SVG plotting: fixed formatting, no external state. */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 20, top: 28, bottom: 44 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  if (x === 0) return "0";
  const s = x.toPrecision(6);
  // normalize exponent and trailing-zero spelling so output is stable
  return String(Number(s));
}

export interface Scale {
  (x: number): number;
  ticks: number[];
}

function linearTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / (n * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi > lo ? hi - lo : 1;
  const f = ((x: number) => outLo + ((x - lo) / span) * (outHi - outLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi > llo ? lhi - llo : 1;
  const f = ((x: number) => outLo + ((Math.log10(x) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi); e++) ticks.push(Math.pow(10, e));
  f.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  return f;
}

export class SvgCanvas {
  private parts: string[] = [];
  constructor(readonly width = WIDTH, readonly height = HEIGHT) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
      `<rect width="${width}" height="${height}" fill="white"/>`
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  polygon(points: Array<[number, number]>, fill: string, opacity = 0.2): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}" fill-opacity="${opacity}" stroke="none"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, anchor = "middle", fill = "#000"): void {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" fill="${fill}">${content}</text>`);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface Frame {
  canvas: SvgCanvas;
  sx: Scale;
  sy: Scale;
}

export function axes(
  canvas: SvgCanvas,
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
  box = { x0: MARGIN.left, x1: WIDTH - MARGIN.right, y0: HEIGHT - MARGIN.bottom, y1: MARGIN.top }
): void {
  canvas.line(box.x0, box.y0, box.x1, box.y0, "#333");
  canvas.line(box.x0, box.y0, box.x0, box.y1, "#333");
  for (const t of sx.ticks) {
    const x = sx(t);
    if (x < box.x0 - 1e-6 || x > box.x1 + 1e-6) continue;
    canvas.line(x, box.y0, x, box.y0 + 4, "#333");
    canvas.text(x, box.y0 + 16, fmt(t));
  }
  for (const t of sy.ticks) {
    const y = sy(t);
    if (y > box.y0 + 1e-6 || y < box.y1 - 1e-6) continue;
    canvas.line(box.x0 - 4, y, box.x0, y, "#333");
    canvas.text(box.x0 - 6, y + 3, fmt(t), "end");
  }
  canvas.text((box.x0 + box.x1) / 2, HEIGHT - 8, xLabel);
  canvas.text(14, (box.y0 + box.y1) / 2, yLabel, "middle");
}

export function legend(canvas: SvgCanvas, names: string[], colors: string[]): void {
  names.forEach((name, i) => {
    const y = MARGIN.top + 14 * i;
    canvas.line(WIDTH - 150, y, WIDTH - 130, y, colors[i], 2);
    canvas.text(WIDTH - 126, y + 3, name, "start");
  });
}

/** Blue-to-red ramp used by the heatmap panels. */
export function colorRamp(t: number): string {
  const clamp = Math.max(0, Math.min(1, t));
  const r = Math.round(40 + 200 * clamp);
  const g = Math.round(60 + 40 * (1 - Math.abs(2 * clamp - 1)));
  const b = Math.round(240 - 200 * clamp);
  return `rgb(${r},${g},${b})`;
}
