#!/usr/bin/env node
/** plots --in <csv> --kind <per_curve|sched_bars|coexist_bars> --out <svg> */

import { readFileSync, writeFileSync } from "node:fs";

import { CsvError } from "./csv.js";
import { KIND_SCHEMAS, PlotKind, render } from "./render.js";

function usage(): string {
  return (
    "usage: plots --in <csv> --kind <per_curve|sched_bars|coexist_bars> --out <file.svg>\n" +
    "  per_curve    log-scale PER vs SNR curves (link-sim CSV)\n" +
    "  sched_bars   scheduling-scheme throughput/latency bars (system-sim CSV)\n" +
    "  coexist_bars coexistence-policy throughput bars (system-sim CSV)"
  );
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      console.error(usage());
      return 2;
    }
    args.set(key.slice(2), argv[i + 1]);
  }
  const input = args.get("in");
  const kind = args.get("kind") as PlotKind | undefined;
  const out = args.get("out");
  if (!input || !kind || !out) {
    console.error(usage());
    return 2;
  }
  if (!(kind in KIND_SCHEMAS)) {
    console.error(`unknown kind '${kind}'\n${usage()}`);
    return 2;
  }
  if (!out.endsWith(".svg")) {
    console.error(
      `unsupported output format for '${out}': this environment has no ` +
        "rasterizer, so only .svg output is available",
    );
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 2;
  }
  let svg: string;
  try {
    svg = render(kind, text);
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`${input}: ${err.message}`);
      return 2;
    }
    throw err;
  }
  writeFileSync(out, svg, "utf-8");
  console.log(`wrote ${out}`);
  return 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("plots")) {
  process.exit(main(process.argv.slice(2)));
}
