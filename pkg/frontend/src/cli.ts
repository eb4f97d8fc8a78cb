/**
 * Offline plotting CLI: reads the lab's CSVs, writes SVG.
 *
 *   node dist/cli.js plot-history <history.csv> <out.svg> [--delta0 0.1]
 *   node dist/cli.js plot-convergence <study.csv> <out.svg>
 *
 * Exit codes: 0 written, 1 usage/schema/data error.
 */

import { readFileSync, writeFileSync } from "fs";

import { SchemaError, parseHistory, parseStudy } from "./csv.js";
import { buildConvergenceSvg } from "./plot_convergence.js";
import { buildHistorySvg } from "./plot_history.js";

export function run(argv: string[]): number {
  const [command, input, output, ...rest] = argv;
  if (!command || !input || !output) {
    console.error(
      "usage: plot-history|plot-convergence <input.csv> <out.svg> [--delta0 X]",
    );
    return 1;
  }
  let delta0 = 0.1;
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--delta0" && rest[i + 1] !== undefined) {
      delta0 = Number(rest[i + 1]);
      i += 1;
    } else {
      console.error(`unknown option: ${rest[i]}`);
      return 1;
    }
  }
  if (!Number.isFinite(delta0) || delta0 <= 0) {
    console.error("--delta0 must be a positive number");
    return 1;
  }

  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 1;
  }

  let svg: string;
  try {
    if (command === "plot-history") {
      svg = buildHistorySvg(parseHistory(text), { delta0 });
    } else if (command === "plot-convergence") {
      svg = buildConvergenceSvg(parseStudy(text));
    } else {
      console.error(`unknown command: ${command}`);
      return 1;
    }
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error in ${input}: ${err.message}`);
    } else {
      console.error(`plot error: ${(err as Error).message}`);
    }
    return 1;
  }

  writeFileSync(output, svg);
  console.error(`wrote ${output}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
