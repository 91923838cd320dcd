// minieval <file.qdag> [V=value]...
//
// Prints one "<var>=<value> <probability>" line per query node, in file
// order.  Exit codes: 1 usage error, 2 parse error.

import { readFileSync } from "node:fs";
import {
  evaluate,
  outputLines,
  ParseError,
  parseEvidenceArgs,
  parseQdag,
  UsageError,
} from "./minieval.js";

export function main(argv: string[]): number {
  if (argv.length < 1) {
    process.stderr.write("usage: minieval <file.qdag> [V=value]...\n");
    return 1;
  }
  let text: string;
  try {
    text = readFileSync(argv[0], "utf-8");
  } catch (e) {
    process.stderr.write(`minieval: error: ${(e as Error).message}\n`);
    return 2;
  }
  try {
    const dag = parseQdag(text);
    const evidence = parseEvidenceArgs(dag, argv.slice(1));
    const values = evaluate(dag, evidence);
    for (const line of outputLines(dag, values)) {
      process.stdout.write(line + "\n");
    }
    return 0;
  } catch (e) {
    if (e instanceof ParseError) {
      process.stderr.write(`minieval: error: ${e.message}\n`);
      return 2;
    }
    if (e instanceof UsageError) {
      process.stderr.write(`minieval: error: ${e.message}\n`);
      return 1;
    }
    throw e;
  }
}

process.exit(main(process.argv.slice(2)));
