import { writeFileSync } from "fs";

import { readTable } from "./csv";
import { FigureKind, render } from "./figures";

const KINDS = ["pareto", "bands", "ecdf", "risk-trace", "heatmap"];

function parseArgs(argv: string[]) {
  const args: { inputs: string[]; kind?: string; out?: string; std: boolean } = {
    inputs: [],
    std: false,
  };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") args.inputs.push(...argv[++i].split(","));
    else if (a === "--kind") args.kind = argv[++i];
    else if (a === "--out") args.out = argv[++i];
    else if (a === "--std") args.std = true;
    else throw new Error(`unknown flag: ${a}`);
  }
  if (!args.kind || !KINDS.includes(args.kind)) {
    throw new Error(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (args.inputs.length === 0) throw new Error("--in CSV path required");
  if (!args.out) throw new Error("--out path required");
  return args;
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const tables = args.inputs.map(readTable);
    const svg = render(args.kind as FigureKind, tables, { useStd: args.std });
    writeFileSync(args.out!, svg);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
