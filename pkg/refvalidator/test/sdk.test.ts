import { describe, expect, it } from "vitest";

import {
  extractUnitary,
  fidelity,
  loadSdk,
  parseQasm,
  shimRxxAngles,
  Unitary,
} from "../src/sdk";

const HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n';

function unitaryOf(qasm: string): Unitary {
  const Sdk = loadSdk();
  const result = parseQasm(Sdk, qasm);
  expect(result.ok, result.errors.join("; ")).toBe(true);
  return extractUnitary(result.circuit!);
}

function approx(a: number, b: number, eps = 1e-9): void {
  expect(Math.abs(a - b)).toBeLessThan(eps);
}

describe("shimRxxAngles", () => {
  it("halves numeric angles", () => {
    expect(shimRxxAngles("rxx(0.7) q[0],q[1];")).toBe("rxx(0.35) q[0],q[1];");
  });

  it("leaves other gates untouched", () => {
    const qasm = "rz(0.7) q[0];\nrx(1.2) q[1];";
    expect(shimRxxAngles(qasm)).toBe(qasm);
  });
});

describe("parseQasm", () => {
  it("accepts the workbench dialect", () => {
    const result = parseQasm(
      loadSdk(),
      HEADER + "qreg q[2];\nsx q[0];\nrxx(0.5) q[0],q[1];\ncx q[1],q[0];\n",
    );
    expect(result.ok).toBe(true);
    expect(result.errors).toEqual([]);
  });

  it("reports a dropped semicolon as a parse failure", () => {
    const result = parseQasm(
      loadSdk(),
      HEADER + "qreg q[2];\nx q[0]\nh q[1];\n",
    );
    expect(result.ok).toBe(false);
    expect(result.circuit).toBeNull();
    expect(result.errors.length).toBeGreaterThan(0);
  });
});

describe("extractUnitary", () => {
  it("uses qubit 0 as the most significant index bit", () => {
    // h on q1 of two qubits: |00> -> (|00> + |01>)/sqrt(2), indices 0 and 1.
    // (A gate on q1 keeps the SDK from trimming the register to one qubit:
    // it sizes circuits by the highest qubit used, not the qreg declaration.)
    const u = unitaryOf(HEADER + "qreg q[2];\nh q[1];\n");
    const inv = Math.SQRT1_2;
    expect(u.length).toBe(4);
    approx(u[0][0][0], inv);
    approx(u[1][0][0], inv);
    approx(u[2][0][0], 0);
    approx(u[3][0][0], 0);
  });

  it("matches the textbook cx with control on q0", () => {
    const u = unitaryOf(HEADER + "qreg q[2];\ncx q[0],q[1];\n");
    const expected = [
      [1, 0, 0, 0],
      [0, 1, 0, 0],
      [0, 0, 0, 1],
      [0, 0, 1, 0],
    ];
    for (let i = 0; i < 4; i++) {
      for (let j = 0; j < 4; j++) {
        approx(u[i][j][0], expected[i][j]);
        approx(u[i][j][1], 0);
      }
    }
  });

  it("gives the qelib1 rxx convention after the angle shim", () => {
    // rxx(theta) diagonal entries are cos(theta/2).
    const theta = 0.7;
    const u = unitaryOf(HEADER + `qreg q[2];\nrxx(${theta}) q[0],q[1];\n`);
    approx(u[0][0][0], Math.cos(theta / 2));
    approx(u[0][3][1], -Math.sin(theta / 2));
  });
});

describe("fidelity", () => {
  it("is 1 for a circuit against itself", () => {
    const u = unitaryOf(HEADER + "qreg q[2];\nh q[0];\nrz(1.1) q[1];\n");
    approx(fidelity(u, u), 1, 1e-12);
  });

  it("is 0 for identity vs x", () => {
    const id = unitaryOf(HEADER + "qreg q[1];\n");
    const x = unitaryOf(HEADER + "qreg q[1];\nx q[0];\n");
    approx(fidelity(id, x), 0, 1e-12);
  });

  it("follows cos^2(delta/2) for offset rz angles", () => {
    const delta = 0.42;
    const a = unitaryOf(HEADER + "qreg q[1];\nrz(1.0) q[0];\n");
    const b = unitaryOf(HEADER + `qreg q[1];\nrz(${1.0 + delta}) q[0];\n`);
    approx(fidelity(a, b), Math.cos(delta / 2) ** 2);
  });
});
