import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, describe, expect, it } from "vitest";

import { main, EXIT_IO, EXIT_OK, EXIT_SDK_UNAVAILABLE } from "../src/cli";
import { SdkUnavailableError, loadSdk } from "../src/sdk";
import {
  PairRecordJson,
  readPairs,
  validateBatch,
  validatePair,
} from "../src/validate";

const FIXTURES = path.join(__dirname, "fixtures");
const IONQ_PAIRS = path.join(FIXTURES, "ionq-pairs.jsonl");
const HERON_PAIRS = path.join(FIXTURES, "heron-pairs.jsonl");

const tmpDirs: string[] = [];

function mkTmpDir(): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "refvalidator-"));
  tmpDirs.push(dir);
  return dir;
}

afterEach(() => {
  while (tmpDirs.length > 0) {
    fs.rmSync(tmpDirs.pop()!, { recursive: true, force: true });
  }
});

describe("readPairs", () => {
  it("loads every fixture line", () => {
    expect(readPairs(IONQ_PAIRS).length).toBe(12);
    expect(readPairs(HERON_PAIRS).length).toBe(8);
  });

  it("rejects malformed records", () => {
    const dir = mkTmpDir();
    const bad = path.join(dir, "bad.jsonl");
    fs.writeFileSync(bad, '{"source_qasm": "x"}\n');
    expect(() => readPairs(bad)).toThrow(TypeError);
  });
});

describe("validateBatch on oracle pairs", () => {
  it.each([
    ["ionq", IONQ_PAIRS],
    ["heron", HERON_PAIRS],
  ])("parses and agrees on every %s pair", (_name, file) => {
    const Sdk = loadSdk();
    const pairs = readPairs(file);
    const { records, summary } = validateBatch(Sdk, pairs, file);
    for (const record of records) {
      expect(record.reference_parsed).toBe(true);
      expect(record.reference_fidelity!).toBeGreaterThanOrEqual(1 - 1e-9);
      expect(record.agreement).toBe(true);
    }
    expect(summary.grammar_accuracy).toBe(1);
    expect(summary.all_agree).toBe(true);
    expect(summary.max_disagreement!).toBeLessThan(1e-6);
  });
});

describe("validatePair", () => {
  it("records a corrupted target without throwing", () => {
    const Sdk = loadSdk();
    const pair = readPairs(IONQ_PAIRS)[0];
    const corrupted: PairRecordJson = {
      ...pair,
      // drop the semicolon on the qreg line to force a parse failure
      target_qasm: pair.target_qasm.replace("];\n", "]\n"),
    };
    expect(corrupted.target_qasm).not.toBe(pair.target_qasm);
    const record = validatePair(Sdk, corrupted, "corrupted#0");
    expect(record.reference_parsed).toBe(false);
    expect(record.reference_fidelity).toBeNull();
    expect(record.agreement).toBe(false);
    expect(record.workbench_fidelity).toBe(pair.fidelity);
  });

  it("reports fidelity 1 for an identical file on both sides", () => {
    const Sdk = loadSdk();
    const pair = readPairs(IONQ_PAIRS)[0];
    const record = validatePair(
      Sdk,
      { ...pair, target_qasm: pair.source_qasm, fidelity: 1 },
      "identical#0",
    );
    expect(record.reference_parsed).toBe(true);
    expect(Math.abs(record.reference_fidelity! - 1)).toBeLessThan(1e-12);
    expect(record.agreement).toBe(true);
  });
});

describe("cli", () => {
  it("writes records and summary and exits 0", () => {
    const out = mkTmpDir();
    const code = main(["--pairs", IONQ_PAIRS, "--out", out]);
    expect(code).toBe(EXIT_OK);
    const summary = JSON.parse(
      fs.readFileSync(path.join(out, "summary.json"), "utf8"),
    );
    expect(summary.n_pairs).toBe(12);
    expect(summary.all_agree).toBe(true);
    const lines = fs
      .readFileSync(path.join(out, "records.jsonl"), "utf8")
      .trim()
      .split("\n");
    expect(lines.length).toBe(12);
  });

  it("exits 3 when the SDK cannot be loaded", () => {
    const code = main(["--pairs", IONQ_PAIRS], () => {
      throw new SdkUnavailableError("simulated missing install");
    });
    expect(code).toBe(EXIT_SDK_UNAVAILABLE);
  });

  it("exits 2 for a missing pairs file", () => {
    const code = main(["--pairs", path.join(mkTmpDir(), "nope.jsonl")]);
    expect(code).toBe(EXIT_IO);
  });
});
