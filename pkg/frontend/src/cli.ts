/** Figure CLI: one subcommand per figure kind.
 *
 *   node dist/cli.js convergence --input sweep.json --out conv.png
 *   node dist/cli.js entropy     --input series.csv --out h.png
 *   node dist/cli.js rao         --input series.csv --out er.png
 *   node dist/cli.js snapshot    --input snapshot.csv --out fields.png
 *
 * Writes the PNG plus a `<out>.meta.json` sidecar with the annotations that
 * were drawn (the convergence figure echoes the fitted rates).  Exit codes:
 * 0 success, 2 usage or input-schema error.
 */

import { writeFileSync } from "node:fs";

import { SchemaError } from "./csv.js";
import { convergenceFigure, entropyTraceFigure, Figure, raoTraceFigure,
         snapshotFigure } from "./figures.js";

const FIGURES: Record<string, (input: string) => Figure> = {
  convergence: convergenceFigure,
  entropy: entropyTraceFigure,
  rao: raoTraceFigure,
  snapshot: snapshotFigure,
};

function parseArgs(argv: string[]): { command: string; input: string; out: string } {
  const [command, ...rest] = argv;
  if (!command || !(command in FIGURES)) {
    throw new SchemaError(`usage: cli.js <${Object.keys(FIGURES).join("|")}> `
      + `--input <file> --out <png>`);
  }
  let input = "";
  let out = "";
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const val = rest[i + 1];
    if (val === undefined) throw new SchemaError(`missing value for ${key}`);
    if (key === "--input") input = val;
    else if (key === "--out") out = val;
    else throw new SchemaError(`unknown flag ${key}`);
  }
  if (!input || !out) throw new SchemaError("both --input and --out are required");
  return { command, input, out };
}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
    const fig = FIGURES[args.command](args.input);
    writeFileSync(args.out, fig.png);
    const meta = {
      command: args.command,
      input: args.input,
      annotations: Object.fromEntries(
        Object.entries(fig.annotations).sort(([a], [b]) => a.localeCompare(b))),
    };
    writeFileSync(`${args.out}.meta.json`, JSON.stringify(meta, null, 2) + "\n");
    for (const [k, v] of Object.entries(meta.annotations)) {
      process.stdout.write(`${k}: ${v}\n`);
    }
    process.stdout.write(`wrote ${args.out}\n`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      process.stderr.write(`error: ${e.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(e as Error).stack ?? e}\n`);
    return 1;
  }
}

const isMain = process.argv[1] && import.meta.url.endsWith(
  process.argv[1].split("/").pop() ?? "");
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
