/**
 * Line charts with a linear x axis and a linear or logarithmic y axis.
 *
 * Cost traces span several orders of magnitude over a solve, so the y axis
 * defaults to log scale with one labelled tick per decade.
 */

import { BLACK, Canvas, Color, GRAY, LIGHT_GRAY } from "./canvas";

export interface Series {
  x: number[];
  y: number[];
  color: Color;
  label?: string;
  thickness?: number;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  title?: string;
  xLabel?: string;
  yLabel?: string;
  logY?: boolean;
  legend?: boolean;
}

const MARGIN = { left: 78, right: 24, top: 34, bottom: 52 };

function niceStep(span: number, targetTicks: number): number {
  const raw = span / Math.max(targetTicks, 1);
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= raw) return mult * power;
  }
  return 10 * power;
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(0).replace("+", "");
  }
  const rounded = Math.round(value * 1000) / 1000;
  return String(rounded);
}

export function renderChart(series: Series[], options: ChartOptions = {}): Canvas {
  const width = options.width ?? 900;
  const height = options.height ?? 600;
  const logY = options.logY ?? true;
  const canvas = new Canvas(width, height);

  const points = series.flatMap((s) =>
    s.x.map((x, i) => [x, s.y[i]] as const).filter(([x, y]) =>
      Number.isFinite(x) && Number.isFinite(y) && (!logY || y > 0)
    )
  );
  if (points.length === 0) {
    throw new Error("nothing to plot: no finite data points" + (logY ? " above zero" : ""));
  }

  let xMin = Math.min(...points.map((p) => p[0]));
  let xMax = Math.max(...points.map((p) => p[0]));
  if (xMax === xMin) {
    xMin -= 0.5;
    xMax += 0.5;
  }
  const yValues = points.map((p) => (logY ? Math.log10(p[1]) : p[1]));
  let yMin = Math.min(...yValues);
  let yMax = Math.max(...yValues);
  if (yMax === yMin) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const pad = 0.04 * (yMax - yMin);
  yMin -= pad;
  yMax += pad;

  const plotLeft = MARGIN.left;
  const plotRight = width - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = height - MARGIN.bottom;

  const toX = (x: number) => plotLeft + ((x - xMin) / (xMax - xMin)) * (plotRight - plotLeft);
  const toY = (y: number) => {
    const value = logY ? Math.log10(y) : y;
    return plotBottom - ((value - yMin) / (yMax - yMin)) * (plotBottom - plotTop);
  };

  // x ticks on a nice linear grid
  const xStep = niceStep(xMax - xMin, 6);
  for (let tick = Math.ceil(xMin / xStep) * xStep; tick <= xMax + 1e-12; tick += xStep) {
    const px = Math.round(toX(tick));
    canvas.line(px, plotTop, px, plotBottom, LIGHT_GRAY);
    canvas.line(px, plotBottom, px, plotBottom + 4, BLACK);
    const label = formatTick(tick);
    canvas.text(px - Math.floor(canvas.textWidth(label) / 2), plotBottom + 8, label);
  }

  // y ticks: decades when logarithmic, nice steps otherwise
  if (logY) {
    for (let exp = Math.ceil(yMin); exp <= Math.floor(yMax); exp++) {
      const py = Math.round(plotBottom - ((exp - yMin) / (yMax - yMin)) * (plotBottom - plotTop));
      canvas.line(plotLeft, py, plotRight, py, LIGHT_GRAY);
      canvas.line(plotLeft - 4, py, plotLeft, py, BLACK);
      const label = `1E${exp}`;
      canvas.text(plotLeft - 8 - canvas.textWidth(label), py - 3, label);
    }
  } else {
    const yStep = niceStep(yMax - yMin, 6);
    for (let tick = Math.ceil(yMin / yStep) * yStep; tick <= yMax + 1e-12; tick += yStep) {
      const py = Math.round(toY(tick));
      canvas.line(plotLeft, py, plotRight, py, LIGHT_GRAY);
      canvas.line(plotLeft - 4, py, plotLeft, py, BLACK);
      const label = formatTick(tick);
      canvas.text(plotLeft - 8 - canvas.textWidth(label), py - 3, label);
    }
  }

  // frame
  canvas.line(plotLeft, plotTop, plotLeft, plotBottom, BLACK);
  canvas.line(plotLeft, plotBottom, plotRight, plotBottom, BLACK);
  canvas.line(plotRight, plotTop, plotRight, plotBottom, GRAY);
  canvas.line(plotLeft, plotTop, plotRight, plotTop, GRAY);

  // data
  for (const s of series) {
    const thickness = s.thickness ?? 1;
    let prev: readonly [number, number] | null = null;
    for (let i = 0; i < s.x.length; i++) {
      const x = s.x[i];
      const y = s.y[i];
      if (!Number.isFinite(x) || !Number.isFinite(y) || (logY && y <= 0)) {
        prev = null;
        continue;
      }
      const point = [toX(x), toY(y)] as const;
      if (prev) canvas.line(prev[0], prev[1], point[0], point[1], s.color, thickness);
      prev = point;
    }
  }

  if (options.title) {
    canvas.text(
      Math.floor((plotLeft + plotRight - canvas.textWidth(options.title)) / 2),
      10,
      options.title
    );
  }
  if (options.xLabel) {
    canvas.text(
      Math.floor((plotLeft + plotRight - canvas.textWidth(options.xLabel)) / 2),
      height - 14,
      options.xLabel
    );
  }
  if (options.yLabel) {
    canvas.text(6, plotTop - 14, options.yLabel);
  }

  if (options.legend ?? true) {
    const entries = series.filter((s) => s.label);
    let y = plotTop + 8;
    for (const entry of entries) {
      const x = plotRight - 170;
      canvas.line(x, y + 3, x + 22, y + 3, entry.color, Math.max(entry.thickness ?? 1, 2));
      canvas.text(x + 28, y, entry.label as string);
      y += 13;
    }
  }

  return canvas;
}
