"""Solovay-Kitaev decomposition of single-qubit unitaries into discrete
gate sequences.

The depth-0 net enumerates all basis sequences up to ``base_length``
(pruning immediate inverses, deduplicating by a phase-normalized matrix
fingerprint, keeping the shortest spelling).  Deeper levels apply the
balanced group-commutator correction to the previous level's residual.
Distances are operator-norm distances minimized over global phase:
d(U, V) = sqrt(2 - |Tr(U^dag V)|) for 2x2 unitaries.

Sequences are in application order: ``["h", "t"]`` means h first, so the
composed matrix is T @ H.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gates import gate_matrix
from .qasm import GATE_SIGNATURES, Circuit, GateApplication

INVERSE_NAMES = {
    "h": "h",
    "x": "x",
    "t": "tdg",
    "tdg": "t",
    "s": "sdg",
    "sdg": "s",
}

_PAULIS = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


class SkError(Exception):
    pass


class NonDenseBasisWarning(UserWarning):
    """The basis cannot reach the requested precision (distance plateaued)."""


@dataclass(frozen=True)
class SkConfig:
    basis: tuple[str, ...] = ("h", "t", "tdg")
    base_length: int = 12
    recursion_depth: int = 2
    eps_target: float = 1e-2
    cache_dir: str | Path | None = None

    def __post_init__(self):
        if not self.basis:
            raise SkError("basis must not be empty")
        for g in self.basis:
            if g not in INVERSE_NAMES:
                raise SkError(f"gate {g!r} has no registered inverse")
            if INVERSE_NAMES[g] not in self.basis:
                raise SkError(
                    f"basis not closed under inverses: {g!r} needs "
                    f"{INVERSE_NAMES[g]!r}"
                )
            if GATE_SIGNATURES[g] != (1, 0):
                raise SkError(f"basis gate {g!r} is not a fixed single-qubit gate")
        if self.base_length < 1:
            raise SkError("base_length must be >= 1")
        if self.recursion_depth < 0:
            raise SkError("recursion_depth must be >= 0")
        if self.eps_target <= 0:
            raise SkError("eps_target must be > 0")


@dataclass(frozen=True)
class SkResult:
    sequence: tuple[str, ...]
    achieved_distance: float
    length: int
    plateau_warning: bool = False


def distance(u: np.ndarray, v: np.ndarray) -> float:
    """Operator-norm distance between 2x2 unitaries, minimized over phase."""
    return float(np.sqrt(max(0.0, 2.0 - abs(np.trace(u.conj().T @ v)))))


def compose_sequence(sequence: tuple[str, ...]) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for name in sequence:
        u = gate_matrix(name) @ u
    return u


def invert_sequence(sequence: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(INVERSE_NAMES[name] for name in reversed(sequence))


class SequenceNet:
    """Shortest spelling of every distinct unitary reachable within
    ``base_length`` basis gates."""

    def __init__(self, sequences: list[tuple[str, ...]], matrices: np.ndarray):
        self.sequences = sequences
        self.matrices = matrices  # (N, 2, 2) complex

    def nearest(self, u: np.ndarray) -> tuple[tuple[str, ...], np.ndarray, float]:
        overlaps = np.abs(np.einsum("ab,nab->n", u.conj(), self.matrices))
        idx = int(np.argmax(overlaps))
        d = float(np.sqrt(max(0.0, 2.0 - overlaps[idx])))
        return self.sequences[idx], self.matrices[idx], d


def _fingerprint(u: np.ndarray) -> bytes:
    # phase-normalize on the largest-magnitude entry (magnitudes rounded
    # first so float noise cannot flip which entry anchors the phase)
    flat = u.ravel()
    k = int(np.argmax(np.round(np.abs(flat), 6)))
    normed = u * (abs(flat[k]) / flat[k])
    return (np.round(normed, 8) + 0.0).tobytes()  # +0.0 collapses signed zeros


def _net_cache_key(basis: tuple[str, ...], base_length: int) -> str:
    payload = ",".join(basis) + f":{base_length}"
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


_NET_MEMO: dict[str, SequenceNet] = {}


def build_net(cfg: SkConfig) -> SequenceNet:
    key = _net_cache_key(cfg.basis, cfg.base_length)
    if key in _NET_MEMO:
        return _NET_MEMO[key]
    cache_file = None
    if cfg.cache_dir is not None:
        cache_file = Path(cfg.cache_dir) / f"sknet-{key}.npz"
        if cache_file.exists():
            net = _load_net(cache_file)
            _NET_MEMO[key] = net
            return net

    gates = {g: gate_matrix(g) for g in cfg.basis}
    seen: dict[bytes, int] = {}
    sequences: list[tuple[str, ...]] = [()]
    matrices: list[np.ndarray] = [np.eye(2, dtype=complex)]
    seen[_fingerprint(matrices[0])] = 0
    frontier: list[tuple[tuple[str, ...], np.ndarray]] = [((), matrices[0])]
    for _ in range(cfg.base_length):
        next_frontier = []
        for seq, mat in frontier:
            last = seq[-1] if seq else None
            for name, g in gates.items():
                if last is not None and INVERSE_NAMES[name] == last:
                    continue  # immediate cancellation
                new_seq = seq + (name,)
                new_mat = g @ mat
                fp = _fingerprint(new_mat)
                if fp in seen:
                    continue
                seen[fp] = len(sequences)
                sequences.append(new_seq)
                matrices.append(new_mat)
                next_frontier.append((new_seq, new_mat))
        frontier = next_frontier
    net = SequenceNet(sequences, np.array(matrices))
    _NET_MEMO[key] = net
    if cache_file is not None:
        _save_net(net, cache_file)
    return net


def _save_net(net: SequenceNet, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(
        path,
        matrices=net.matrices,
        sequences=np.array(["/".join(s) for s in net.sequences], dtype=object),
        allow_pickle=True,
    )


def _load_net(path: Path) -> SequenceNet:
    data = np.load(path, allow_pickle=True)
    sequences = [
        tuple(s.split("/")) if s else () for s in data["sequences"].tolist()
    ]
    return SequenceNet(sequences, data["matrices"])


def basic_approx(u: np.ndarray, cfg: SkConfig) -> SkResult:
    """Closest net sequence to ``u`` (projective distance), deterministic."""
    _check_unitary(u)
    seq, _, d = build_net(cfg).nearest(u)
    return SkResult(sequence=seq, achieved_distance=d, length=len(seq))


def _check_unitary(u: np.ndarray) -> None:
    if u.shape != (2, 2):
        raise SkError(f"expected a 2x2 unitary, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-9):
        raise SkError("input matrix is not unitary")


def _to_su2(u: np.ndarray) -> np.ndarray:
    det = np.linalg.det(u)
    return u / np.sqrt(det)


def _rotation_axis_angle(su2: np.ndarray) -> tuple[np.ndarray, float]:
    c = float(np.clip(np.real(np.trace(su2)) / 2.0, -1.0, 1.0))
    theta = 2.0 * np.arccos(c)
    s = np.sin(theta / 2.0)
    if s < 1e-12:
        return np.array([0.0, 0.0, 1.0]), theta
    axis = np.array(
        [
            -np.imag(su2[0, 1]) / s,
            -np.real(su2[0, 1]) / s,
            -np.imag(su2[0, 0]) / s,
        ]
    )
    norm = np.linalg.norm(axis)
    return axis / norm, theta


def _rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    n_dot_sigma = sum(a * p for a, p in zip(axis, _PAULIS))
    return (
        np.cos(angle / 2.0) * np.eye(2) - 1j * np.sin(angle / 2.0) * n_dot_sigma
    )


def _axis_aligner(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """SU(2) element S with S R_src S^dag = R_dst for equal rotation angles."""
    dot = float(np.clip(np.dot(src, dst), -1.0, 1.0))
    if dot > 1.0 - 1e-12:
        return np.eye(2, dtype=complex)
    if dot < -1.0 + 1e-12:
        # rotate by pi about any axis perpendicular to src
        perp = np.cross(src, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(src, [0.0, 1.0, 0.0])
        return _rotation(perp / np.linalg.norm(perp), np.pi)
    axis = np.cross(src, dst)
    return _rotation(axis / np.linalg.norm(axis), np.arccos(dot))


def _group_commutator_factors(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Balanced V, W with V W V^dag W^dag = delta (up to global phase)."""
    su2 = _to_su2(delta)
    axis, theta = _rotation_axis_angle(su2)
    # commutator of phi-rotations about x and y rotates by theta_c with
    # sin(theta_c/2) = 2 sin^2(phi/2) sqrt(1 - sin^4(phi/2))
    s2 = np.sin(float(np.clip(0.5 * np.arcsin(np.sin(theta / 2.0)), 0, np.pi / 2)))
    phi = 2.0 * np.arcsin(np.sqrt(s2))
    v = _rotation(np.array([1.0, 0.0, 0.0]), phi)
    w = _rotation(np.array([0.0, 1.0, 0.0]), phi)
    commutator = v @ w @ v.conj().T @ w.conj().T
    c_axis, _ = _rotation_axis_angle(_to_su2(commutator))
    aligner = _axis_aligner(c_axis, axis)
    return aligner @ v @ aligner.conj().T, aligner @ w @ aligner.conj().T


def _sk_recurse(
    u: np.ndarray, depth: int, net: SequenceNet
) -> tuple[tuple[str, ...], np.ndarray, float]:
    if depth == 0:
        return net.nearest(u)
    prev_seq, prev_mat, prev_d = _sk_recurse(u, depth - 1, net)
    v, w = _group_commutator_factors(u @ prev_mat.conj().T)
    v_seq, v_mat, _ = _sk_recurse(v, depth - 1, net)
    w_seq, w_mat, _ = _sk_recurse(w, depth - 1, net)
    mat = v_mat @ w_mat @ v_mat.conj().T @ w_mat.conj().T @ prev_mat
    seq = (
        prev_seq
        + invert_sequence(w_seq)
        + invert_sequence(v_seq)
        + w_seq
        + v_seq
    )
    d = distance(u, mat)
    if d < prev_d:
        return seq, mat, d
    return prev_seq, prev_mat, prev_d  # correction did not help; keep the best


def sk_decompose(u: np.ndarray, cfg: SkConfig) -> SkResult:
    """Recursive decomposition; never worse than any shallower depth.

    Emits NonDenseBasisWarning when the distance stalls above ``eps_target``
    across two successive depths.
    """
    _check_unitary(u)
    net = build_net(cfg)
    distances = []
    best: tuple[tuple[str, ...], np.ndarray, float] | None = None
    plateau = False
    for depth in range(cfg.recursion_depth + 1):
        best = _sk_recurse(u, depth, net)
        distances.append(best[2])
        if (
            len(distances) >= 2
            and distances[-1] > cfg.eps_target
            and distances[-1] >= distances[-2] - 1e-12
        ):
            plateau = True
    if plateau and distances[-1] > cfg.eps_target:
        warnings.warn(
            f"distance plateaued at {distances[-1]:.3g} above the "
            f"{cfg.eps_target:.3g} target; basis may not be dense",
            NonDenseBasisWarning,
            stacklevel=2,
        )
    seq, _, d = best
    return SkResult(
        sequence=seq,
        achieved_distance=d,
        length=len(seq),
        plateau_warning=plateau and d > cfg.eps_target,
    )


def sk_circuit(circuit: Circuit, cfg: SkConfig) -> Circuit:
    """Rewrite every single-qubit gate into basis sequences; entangling
    gates pass through unchanged.  Each decomposed gate gets an equal share
    eps_target / m of the total budget, m being the number of gates to
    decompose; the recursion deepens (up to recursion_depth) until the
    share is met."""
    to_decompose = [
        op
        for op in circuit.ops
        if GATE_SIGNATURES[op.gate_name][0] == 1 and op.gate_name not in cfg.basis
    ]
    if not to_decompose:
        return circuit
    per_gate = cfg.eps_target / len(to_decompose)
    ops: list[GateApplication] = []
    for op in circuit.ops:
        if GATE_SIGNATURES[op.gate_name][0] != 1 or op.gate_name in cfg.basis:
            ops.append(op)
            continue
        result = sk_decompose(
            gate_matrix(op.gate_name, op.params),
            SkConfig(
                basis=cfg.basis,
                base_length=cfg.base_length,
                recursion_depth=cfg.recursion_depth,
                eps_target=per_gate,
                cache_dir=cfg.cache_dir,
            ),
        )
        ops.extend(GateApplication(name, (), op.qubits) for name in result.sequence)
    return Circuit(
        num_qubits=circuit.num_qubits,
        num_clbits=circuit.num_clbits,
        ops=tuple(ops),
        has_final_measure=circuit.has_final_measure,
    )
