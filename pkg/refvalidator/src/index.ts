export {
  SdkUnavailableError,
  loadSdk,
  parseQasm,
  extractUnitary,
  fidelity,
  shimRxxAngles,
} from "./sdk";
export type { Complex, Unitary, SdkCircuit, SdkConstructor } from "./sdk";
export {
  AGREEMENT_TOLERANCE,
  readPairs,
  validatePair,
  validateBatch,
} from "./validate";
export type {
  PairRecordJson,
  ValidationRecord,
  ValidationSummary,
} from "./validate";
export { main, EXIT_OK, EXIT_IO, EXIT_SDK_UNAVAILABLE, EXIT_USAGE } from "./cli";
