"""Dense matrix definitions for every supported gate.

Rotations use the standard half-angle generators:
Rk(theta) = exp(-i theta/2 sigma_k), Rxx(theta) = exp(-i theta/2 X (x) X).
Two-qubit matrices are indexed with the first listed qubit as the most
significant bit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_SQ2 = 1.0 / math.sqrt(2.0)


def _x(_):
    return np.array([[0, 1], [1, 0]], dtype=complex)


def _sx(_):
    return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)


def _rz(params):
    (theta,) = params
    return np.array(
        [[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=complex
    )


def _rx(params):
    (theta,) = params
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(params):
    (theta,) = params
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rxx(params):
    (theta,) = params
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    m = np.eye(4, dtype=complex) * c
    m[0, 3] = m[1, 2] = m[2, 1] = m[3, 0] = -1j * s
    return m


def _cx(_):
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def _cz(_):
    return np.diag([1, 1, 1, -1]).astype(complex)


def _h(_):
    return _SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)


def _phase(angle):
    def fn(_):
        return np.diag([1, cmath.exp(1j * angle)]).astype(complex)

    return fn


@dataclass(frozen=True)
class GateDef:
    name: str
    arity: int
    param_count: int
    matrix_fn: Callable[[tuple[float, ...]], np.ndarray]

    def matrix(self, params: tuple[float, ...] = ()) -> np.ndarray:
        if len(params) != self.param_count:
            raise ValueError(f"{self.name} expects {self.param_count} parameter(s)")
        return self.matrix_fn(params)


_CATALOG: dict[str, GateDef] = {
    g.name: g
    for g in [
        GateDef("x", 1, 0, _x),
        GateDef("sx", 1, 0, _sx),
        GateDef("rz", 1, 1, _rz),
        GateDef("cx", 2, 0, _cx),
        GateDef("rx", 1, 1, _rx),
        GateDef("ry", 1, 1, _ry),
        GateDef("rxx", 2, 1, _rxx),
        GateDef("cz", 2, 0, _cz),
        GateDef("h", 1, 0, _h),
        GateDef("t", 1, 0, _phase(math.pi / 4)),
        GateDef("tdg", 1, 0, _phase(-math.pi / 4)),
        GateDef("s", 1, 0, _phase(math.pi / 2)),
        GateDef("sdg", 1, 0, _phase(-math.pi / 2)),
    ]
}


def gate_catalog() -> list[GateDef]:
    return list(_CATALOG.values())


def gate_def(name: str) -> GateDef:
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown gate {name!r}") from None


def gate_matrix(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    return gate_def(name).matrix(tuple(params))
