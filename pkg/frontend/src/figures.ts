/**
 * The four figure kinds, each consuming the documented CSV formats:
 *
 * - trace-compare: cost-vs-iteration curves from trace files
 * - ensemble-spaghetti: every member of an ensemble directory plus an
 *   optional reference trace
 * - mean-compare: ensemble aggregate means, optional reference trace
 * - singular-values: index-vs-value series, one per rank column
 */

import { readdirSync } from "fs";
import { join } from "path";

import { Canvas, GRAY, PALETTE } from "./canvas";
import { column, CsvError, readCsv } from "./csv";
import { renderChart, Series } from "./chart";

export interface FigureResult {
  canvas: Canvas;
  /** member files consumed (ensemble-spaghetti only) */
  memberCount?: number;
}

export interface CommonOptions {
  title?: string;
  width?: number;
  height?: number;
}

function traceSeries(path: string, color: Series["color"], label?: string, thickness = 2): Series {
  const table = readCsv(path);
  return {
    x: column(table, "iteration", path),
    y: column(table, "cost", path),
    color,
    label,
    thickness,
  };
}

export function traceCompare(
  inputs: string[],
  labels: string[],
  options: CommonOptions = {}
): FigureResult {
  if (inputs.length === 0) throw new CsvError("trace-compare needs at least one input");
  const series = inputs.map((path, i) =>
    traceSeries(path, PALETTE[i % PALETTE.length], labels[i] ?? path)
  );
  const canvas = renderChart(series, {
    ...options,
    xLabel: "iteration",
    yLabel: "quadratic cost",
    logY: true,
  });
  return { canvas };
}

export function ensembleSpaghetti(
  membersDir: string,
  reference?: string,
  options: CommonOptions = {}
): FigureResult {
  let names: string[];
  try {
    names = readdirSync(membersDir).filter((f) => /^member_\d+\.csv$/.test(f)).sort();
  } catch (err) {
    throw new CsvError(`cannot list ${membersDir}: ${(err as Error).message}`);
  }
  if (names.length === 0) {
    throw new CsvError(`${membersDir} holds no member_XXX.csv files`);
  }
  const series: Series[] = names.map((name) => ({
    ...traceSeries(join(membersDir, name), GRAY, undefined, 1),
  }));
  series[0].label = `${names.length} realisations`;
  if (reference) {
    series.push(traceSeries(reference, PALETTE[0], "no preconditioner", 2));
  }
  const canvas = renderChart(series, {
    ...options,
    xLabel: "iteration",
    yLabel: "quadratic cost",
    logY: true,
  });
  return { canvas, memberCount: names.length };
}

export function meanCompare(
  inputs: string[],
  labels: string[],
  reference?: string,
  options: CommonOptions = {}
): FigureResult {
  if (inputs.length === 0) throw new CsvError("mean-compare needs at least one input");
  const series: Series[] = inputs.map((path, i) => {
    const table = readCsv(path);
    return {
      x: column(table, "iteration", path),
      y: column(table, "mean", path),
      color: PALETTE[(i + 1) % PALETTE.length],
      label: labels[i] ?? path,
      thickness: 2,
    };
  });
  if (reference) {
    series.unshift(traceSeries(reference, PALETTE[0], "no preconditioner", 2));
  }
  const canvas = renderChart(series, {
    ...options,
    xLabel: "iteration",
    yLabel: "mean quadratic cost",
    logY: true,
  });
  return { canvas };
}

export function singularValues(input: string, options: CommonOptions = {}): FigureResult {
  const table = readCsv(input);
  const index = column(table, "index", input);
  const series: Series[] = [];
  let paletteAt = 0;
  for (const name of table.header) {
    if (name === "index") continue;
    const values = column(table, name, input);
    series.push({
      x: index,
      y: values, // NaN cells end the rank columns early
      color: name === "exact" ? [0, 0, 0] : PALETTE[paletteAt++ % PALETTE.length],
      label: name,
      thickness: name === "exact" ? 1 : 2,
    });
  }
  if (series.length === 0) throw new CsvError(`${input}: no value columns`);
  const canvas = renderChart(series, {
    ...options,
    xLabel: "index",
    yLabel: "singular value",
    logY: true,
  });
  return { canvas };
}
