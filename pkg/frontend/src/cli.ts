#!/usr/bin/env node
/**
 * coldbeam-plots --run-dir <dir> [--only <check>] [--out <dir>]
 *
 * Reads a scan run directory (manifest.json + CSV tables) and writes SVG
 * figures: one log-log scaling figure per fitted check (slope annotations
 * taken from the manifest verbatim) and orbit-pair overlays with the
 * gap-versus-time inset.
 */

import { join } from "node:path";
import { exit } from "node:process";

import { renderAll } from "./figures.js";
import { loadRun } from "./manifest.js";

interface Args {
  runDir?: string;
  only?: string;
  out?: string;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = {};
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--run-dir") args.runDir = argv[++i];
    else if (a === "--only") args.only = argv[++i];
    else if (a === "--out") args.out = argv[++i];
    else if (a === "--help" || a === "-h") {
      console.log(
        "usage: coldbeam-plots --run-dir <dir> [--only <check>] [--out <dir>]",
      );
      exit(0);
    } else {
      throw new Error(`unknown argument '${a}'`);
    }
  }
  if (args.runDir === undefined) {
    throw new Error("--run-dir is required");
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const run = loadRun(args.runDir!);
    const outDir = args.out ?? join(args.runDir!, "figures");
    const written = renderAll(run, outDir, args.only);
    for (const path of written) console.log(path);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invoked = process.argv[1] ?? "";
if (invoked.endsWith("cli.js") || invoked.endsWith("coldbeam-plots")) {
  exit(main(process.argv.slice(2)));
}
