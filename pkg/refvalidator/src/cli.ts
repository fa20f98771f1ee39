#!/usr/bin/env node
/**
 * refvalidate --pairs <pairs.jsonl> [--out <dir>]
 *
 * Reads a workbench pair dataset, re-checks every pair with the reference
 * SDK, prints the summary JSON to stdout, and (with --out) writes
 * records.jsonl and summary.json to the output directory.
 *
 * Exit codes: 0 success, 1 usage error, 2 unreadable input, 3 SDK missing.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { SdkConstructor, SdkUnavailableError, loadSdk } from "./sdk";
import { readPairs, validateBatch } from "./validate";

export const EXIT_OK = 0;
export const EXIT_USAGE = 1;
export const EXIT_IO = 2;
export const EXIT_SDK_UNAVAILABLE = 3;

const USAGE =
  "usage: refvalidate --pairs <pairs.jsonl> [--out <dir>]";

interface CliArgs {
  pairs: string;
  out: string | null;
}

function parseArgs(argv: string[]): CliArgs {
  let pairs: string | null = null;
  let out: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--pairs":
        pairs = argv[++i];
        break;
      case "--out":
        out = argv[++i];
        break;
      case "--help":
      case "-h":
        throw new UsageError(USAGE, EXIT_OK);
      default:
        throw new UsageError(`unknown argument '${argv[i]}'\n${USAGE}`);
    }
  }
  if (!pairs) {
    throw new UsageError(`--pairs is required\n${USAGE}`);
  }
  return { pairs, out };
}

class UsageError extends Error {
  constructor(message: string, public readonly code: number = EXIT_USAGE) {
    super(message);
  }
}

export function main(
  argv: string[],
  sdkLoader: () => SdkConstructor = loadSdk,
): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      const stream = err.code === EXIT_OK ? process.stdout : process.stderr;
      stream.write(err.message + "\n");
      return err.code;
    }
    throw err;
  }

  let Sdk: SdkConstructor;
  try {
    Sdk = sdkLoader();
  } catch (err) {
    if (err instanceof SdkUnavailableError) {
      process.stderr.write(`error: ${err.message}\n`);
      return EXIT_SDK_UNAVAILABLE;
    }
    throw err;
  }

  let pairs;
  try {
    pairs = readPairs(args.pairs);
  } catch (err) {
    process.stderr.write(`error: cannot read pairs: ${String(err)}\n`);
    return EXIT_IO;
  }

  const { records, summary } = validateBatch(Sdk, pairs, args.pairs);
  if (args.out) {
    try {
      fs.mkdirSync(args.out, { recursive: true });
      fs.writeFileSync(
        path.join(args.out, "records.jsonl"),
        records.map((r) => JSON.stringify(r)).join("\n") + "\n",
      );
      fs.writeFileSync(
        path.join(args.out, "summary.json"),
        JSON.stringify(summary, null, 2) + "\n",
      );
    } catch (err) {
      process.stderr.write(`error: cannot write reports: ${String(err)}\n`);
      return EXIT_IO;
    }
  }
  process.stdout.write(JSON.stringify(summary, null, 2) + "\n");
  return EXIT_OK;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
