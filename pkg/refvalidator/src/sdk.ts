/**
 * Thin wrapper around the `quantum-circuit` npm package: QASM parsing,
 * full-unitary extraction, and phase-invariant fidelity.
 *
 * Conventions bridged here:
 *  - State indices: the SDK stores qubit 0 in the least significant bit of
 *    the state index; the workbench treats qubit 0 as the most significant
 *    tensor factor.  All matrices returned by {@link extractUnitary} are
 *    re-indexed to the workbench (q0 = MSB) ordering.
 *  - `rxx`: qelib1 defines rxx(theta) = exp(-i theta/2 X(x)X) while the SDK's
 *    `xx` gate is exp(-i theta X(x)X), so angles are halved before import.
 */

export class SdkUnavailableError extends Error {}

export type Complex = [number, number];
export type Unitary = Complex[][];

/** Minimal surface of the quantum-circuit class that we rely on. */
export interface SdkCircuit {
  numQubits: number;
  state: Record<number, { re: number; im: number }>;
  importQASM(qasm: string, errorCallback: (errors: unknown[]) => void): void;
  run(initialBits: number[]): void;
}

export type SdkConstructor = new () => SdkCircuit;

const MAX_QUBITS = 10;

/**
 * Resolve the reference SDK.  A missing or broken installation raises
 * SdkUnavailableError so callers can map it to a distinct exit code.
 */
export function loadSdk(): SdkConstructor {
  let mod: unknown;
  try {
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    mod = require("quantum-circuit");
  } catch (err) {
    throw new SdkUnavailableError(
      `reference SDK 'quantum-circuit' could not be loaded: ${String(err)}`,
    );
  }
  if (typeof mod !== "function") {
    throw new SdkUnavailableError(
      "reference SDK 'quantum-circuit' did not export a constructor",
    );
  }
  return mod as SdkConstructor;
}

/** Halve every rxx angle to compensate for the SDK's xx parameterization. */
export function shimRxxAngles(qasm: string): string {
  return qasm.replace(/rxx\(([^)]+)\)/g, (whole, arg: string) => {
    const value = Number.parseFloat(arg);
    if (!Number.isFinite(value)) {
      return whole; // leave symbolic args to the SDK parser
    }
    return `rxx(${value / 2})`;
  });
}

export interface ParseResult {
  ok: boolean;
  circuit: SdkCircuit | null;
  errors: string[];
}

/** Parse one QASM program with the SDK; parse failures are data, not throws. */
export function parseQasm(Sdk: SdkConstructor, qasm: string): ParseResult {
  const circuit = new Sdk();
  let reported: unknown[] = [];
  try {
    circuit.importQASM(shimRxxAngles(qasm), (errors) => {
      reported = errors ?? [];
    });
  } catch (err) {
    return { ok: false, circuit: null, errors: [String(err)] };
  }
  if (reported.length > 0) {
    return {
      ok: false,
      circuit: null,
      errors: reported.map((e) => JSON.stringify(e)),
    };
  }
  return { ok: true, circuit, errors: [] };
}

function bitReversalPermutation(nQubits: number): number[] {
  const dim = 1 << nQubits;
  const perm = new Array<number>(dim);
  for (let i = 0; i < dim; i++) {
    let reversed = 0;
    for (let q = 0; q < nQubits; q++) {
      if ((i >> q) & 1) {
        reversed |= 1 << (nQubits - 1 - q);
      }
    }
    perm[i] = reversed;
  }
  return perm;
}

/**
 * Column-by-column unitary extraction: run the circuit from each basis state
 * and read the final state vector, re-indexed so qubit 0 is the MSB.
 */
export function extractUnitary(circuit: SdkCircuit): Unitary {
  const n = circuit.numQubits;
  if (n < 1 || n > MAX_QUBITS) {
    throw new RangeError(`unitary extraction supports 1..${MAX_QUBITS} qubits, got ${n}`);
  }
  const dim = 1 << n;
  const perm = bitReversalPermutation(n);
  const unitary: Unitary = Array.from({ length: dim }, () =>
    new Array<Complex>(dim),
  );
  for (let col = 0; col < dim; col++) {
    const bits = new Array<number>(n);
    for (let q = 0; q < n; q++) {
      bits[q] = (col >> (n - 1 - q)) & 1; // q0 is the MSB of the column index
    }
    circuit.run(bits);
    for (let row = 0; row < dim; row++) {
      const amp = circuit.state[perm[row]];
      unitary[row][col] = amp ? [amp.re, amp.im] : [0, 0];
    }
  }
  return unitary;
}

/** Phase-invariant fidelity |tr(A^dag B)|^2 / d^2. */
export function fidelity(a: Unitary, b: Unitary): number {
  const dim = a.length;
  if (b.length !== dim) {
    throw new RangeError(`dimension mismatch: ${dim} vs ${b.length}`);
  }
  let re = 0;
  let im = 0;
  for (let i = 0; i < dim; i++) {
    for (let j = 0; j < dim; j++) {
      const [ar, ai] = a[i][j];
      const [br, bi] = b[i][j];
      re += ar * br + ai * bi;
      im += ar * bi - ai * br;
    }
  }
  return (re * re + im * im) / (dim * dim);
}
