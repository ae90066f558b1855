#!/usr/bin/env node
/**
 * plots <figure-id> --in <csv...> --out <path>
 *
 * Renders one deterministic SVG figure from simulation CSVs.  Exit
 * codes: 0 success, 1 bad input (arguments, files, schema), 2
 * unexpected internal failure.
 */
import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { SchemaError, Table, parseTable } from "./csv.js";
import { figureSpec } from "./figures.js";
import { EmptyChartError, renderChart } from "./svg.js";

export function renderFigure(id: string, inputs: Table[]): string {
  return renderChart(figureSpec(id).build(inputs));
}

export function runCli(argv: string[]): number {
  const args = yargs(argv)
    .usage("$0 <figure-id> --in <csv...> --out <path>")
    .command("$0 <figure-id>", "render one figure")
    .option("in", { type: "string", array: true, demandOption: true,
                    describe: "input CSV paths" })
    .option("out", { type: "string", demandOption: true,
                     describe: "output SVG path" })
    .strict()
    .exitProcess(false)
    .fail((msg) => { throw new SchemaError(msg); });
  try {
    const parsed = args.parseSync();
    const tables = (parsed.in as string[]).map((path) => {
      let text: string;
      try {
        text = readFileSync(path, "utf-8");
      } catch {
        throw new SchemaError(`input CSV not found: ${path}`);
      }
      return parseTable(text, path);
    });
    const svg = renderFigure(String(parsed.figureId), tables);
    writeFileSync(String(parsed.out), svg, "utf-8");
    console.log(`wrote ${parsed.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof EmptyChartError) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    console.error(`internal error: ${(err as Error).message}`);
    return 2;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("plots")) {
  process.exit(runCli(hideBin(process.argv)));
}
