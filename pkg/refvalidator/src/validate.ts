/**
 * Batch cross-validation of workbench transpilation pairs against the
 * reference SDK.  Consumes the workbench's JSONL pair format (one JSON
 * object per line with source_qasm, target_qasm, and the workbench's own
 * fidelity) and produces per-pair records plus a summary.
 */

import * as fs from "node:fs";

import {
  SdkConstructor,
  extractUnitary,
  fidelity,
  parseQasm,
} from "./sdk";

export const AGREEMENT_TOLERANCE = 1e-6;

/** One line of the workbench dataset JSONL. */
export interface PairRecordJson {
  source_qasm: string;
  target_qasm: string;
  n_qubits: number;
  depth: number;
  seed: number;
  fidelity: number;
}

export interface ValidationRecord {
  qasm_path: string;
  reference_parsed: boolean;
  reference_fidelity: number | null;
  workbench_fidelity: number;
  agreement: boolean;
  parse_errors: string[];
}

export interface ValidationSummary {
  n_pairs: number;
  n_parsed: number;
  grammar_accuracy: number;
  n_agree: number;
  all_agree: boolean;
  max_disagreement: number | null;
  tolerance: number;
}

export function readPairs(path: string): PairRecordJson[] {
  const text = fs.readFileSync(path, "utf8");
  const pairs: PairRecordJson[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    const record = JSON.parse(trimmed) as PairRecordJson;
    if (
      typeof record.source_qasm !== "string" ||
      typeof record.target_qasm !== "string" ||
      typeof record.fidelity !== "number"
    ) {
      throw new TypeError(
        `malformed pair record in ${path}: ${trimmed.slice(0, 120)}`,
      );
    }
    pairs.push(record);
  }
  return pairs;
}

/** Validate one pair; SDK-side parse failures are recorded, never thrown. */
export function validatePair(
  Sdk: SdkConstructor,
  pair: PairRecordJson,
  qasmPath: string,
): ValidationRecord {
  const source = parseQasm(Sdk, pair.source_qasm);
  const target = parseQasm(Sdk, pair.target_qasm);
  const errors = [...source.errors, ...target.errors];
  if (!source.ok || !target.ok) {
    return {
      qasm_path: qasmPath,
      reference_parsed: false,
      reference_fidelity: null,
      workbench_fidelity: pair.fidelity,
      agreement: false,
      parse_errors: errors,
    };
  }
  const referenceFidelity = fidelity(
    extractUnitary(source.circuit!),
    extractUnitary(target.circuit!),
  );
  return {
    qasm_path: qasmPath,
    reference_parsed: true,
    reference_fidelity: referenceFidelity,
    workbench_fidelity: pair.fidelity,
    agreement:
      Math.abs(referenceFidelity - pair.fidelity) < AGREEMENT_TOLERANCE,
    parse_errors: errors,
  };
}

export function validateBatch(
  Sdk: SdkConstructor,
  pairs: PairRecordJson[],
  manifestPath: string,
): { records: ValidationRecord[]; summary: ValidationSummary } {
  const records = pairs.map((pair, index) =>
    validatePair(Sdk, pair, `${manifestPath}#${index}`),
  );
  const parsed = records.filter((r) => r.reference_parsed);
  const agreeing = records.filter((r) => r.agreement);
  const disagreements = parsed.map((r) =>
    Math.abs((r.reference_fidelity as number) - r.workbench_fidelity),
  );
  const summary: ValidationSummary = {
    n_pairs: records.length,
    n_parsed: parsed.length,
    grammar_accuracy: records.length > 0 ? parsed.length / records.length : 0,
    n_agree: agreeing.length,
    all_agree: agreeing.length === records.length && records.length > 0,
    max_disagreement:
      disagreements.length > 0 ? Math.max(...disagreements) : null,
    tolerance: AGREEMENT_TOLERANCE,
  };
  return { records, summary };
}
