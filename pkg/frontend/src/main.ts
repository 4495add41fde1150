#!/usr/bin/env node
/**
 * CLI for rendering solver CSV outputs as PNG figures.
 *
 * Usage:
 *   wc4dvar-figures trace-compare --inputs a.csv b.csv --labels "none" "exact" --out fig.png
 *   wc4dvar-figures ensemble-spaghetti --members-dir ens/ [--reference none.csv] --out fig.png
 *   wc4dvar-figures mean-compare --inputs agg1.csv agg2.csv --labels ... [--reference none.csv] --out fig.png
 *   wc4dvar-figures singular-values --input sv.csv --out fig.png
 *
 * Common flags: --title STR --width N --height N
 * Exit code 0 if and only if an image was written.
 */

import { writeFileSync } from "fs";

import { CsvError } from "./csv";
import {
  CommonOptions,
  ensembleSpaghetti,
  FigureResult,
  meanCompare,
  singularValues,
  traceCompare,
} from "./figures";

const KINDS = ["trace-compare", "ensemble-spaghetti", "mean-compare", "singular-values"];

interface Args {
  kind: string;
  out?: string;
  inputs: string[];
  labels: string[];
  membersDir?: string;
  reference?: string;
  input?: string;
  options: CommonOptions;
}

class UsageError extends Error {}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new UsageError(`missing figure kind (one of: ${KINDS.join(", ")})`);
  }
  const [kind, ...rest] = argv;
  if (!KINDS.includes(kind)) {
    throw new UsageError(`unknown figure kind "${kind}" (one of: ${KINDS.join(", ")})`);
  }
  const args: Args = { kind, inputs: [], labels: [], options: {} };
  let i = 0;
  const next = (flag: string): string => {
    if (i >= rest.length) throw new UsageError(`${flag} needs a value`);
    return rest[i++];
  };
  const collect = (): string[] => {
    const values: string[] = [];
    while (i < rest.length && !rest[i].startsWith("--")) values.push(rest[i++]);
    return values;
  };
  while (i < rest.length) {
    const flag = rest[i++];
    switch (flag) {
      case "--out":
        args.out = next(flag);
        break;
      case "--inputs":
        args.inputs = collect();
        break;
      case "--labels":
        args.labels = collect();
        break;
      case "--members-dir":
        args.membersDir = next(flag);
        break;
      case "--reference":
        args.reference = next(flag);
        break;
      case "--input":
        args.input = next(flag);
        break;
      case "--title":
        args.options.title = next(flag);
        break;
      case "--width":
        args.options.width = Number(next(flag));
        break;
      case "--height":
        args.options.height = Number(next(flag));
        break;
      default:
        throw new UsageError(`unknown flag ${flag}`);
    }
  }
  if (!args.out) throw new UsageError("--out is required");
  return args;
}

function buildFigure(args: Args): FigureResult {
  switch (args.kind) {
    case "trace-compare":
      return traceCompare(args.inputs, args.labels, args.options);
    case "ensemble-spaghetti":
      if (!args.membersDir) throw new UsageError("ensemble-spaghetti needs --members-dir");
      return ensembleSpaghetti(args.membersDir, args.reference, args.options);
    case "mean-compare":
      return meanCompare(args.inputs, args.labels, args.reference, args.options);
    case "singular-values":
      if (!args.input) throw new UsageError("singular-values needs --input");
      return singularValues(args.input, args.options);
    default:
      throw new UsageError(`unhandled kind ${args.kind}`);
  }
}

export function run(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const result = buildFigure(args);
    writeFileSync(args.out as string, result.canvas.toPng());
    const members = result.memberCount !== undefined ? `, members: ${result.memberCount}` : "";
    console.log(`wrote ${args.out} (${result.canvas.width}x${result.canvas.height}${members})`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError || err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
