"""Stochastic Pauli channels: per-qubit probability tables and sampling.

Only i.i.d. product channels are representable; the table is per qubit so
biased or inhomogeneous channels fit without API changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import PauliString

# Single-qubit Pauli indices used throughout: columns of the table.
PAULI_I, PAULI_X, PAULI_Y, PAULI_Z = 0, 1, 2, 3

# index -> (x bit, z bit); Y carries both.
_XZ_OF_INDEX = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=np.uint8)
# (x bit, z bit) -> index
_INDEX_OF_XZ = np.array([[0, 3], [1, 2]], dtype=np.uint8)


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit table ``table[q, P]`` of probabilities for P in (I, X, Y, Z)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.table, dtype=np.float64)
        if t.ndim != 2 or t.shape[1] != 4:
            raise ValueError("table must have shape (n, 4)")
        if (t < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if np.abs(t.sum(axis=1) - 1.0).max() > 1e-12:
            raise ValueError("per-qubit probabilities must sum to 1 within 1e-12")
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]


def depolarizing(epsilon: float, n: int) -> NoiseModel:
    """Depolarizing channel: I with 1-eps, each of X, Y, Z with eps/3."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    row = np.array([1.0 - epsilon, epsilon / 3.0, epsilon / 3.0, epsilon / 3.0])
    return NoiseModel(np.tile(row, (n, 1)))


def prob_of(model: NoiseModel, q: int, pauli: int) -> float:
    """Probability of single-qubit Pauli ``pauli`` (index 0..3) on qubit q."""
    if not 0 <= q < model.n:
        raise IndexError(f"qubit {q} out of range for n={model.n}")
    if not 0 <= pauli < 4:
        raise IndexError(f"Pauli index {pauli} out of range")
    return float(model.table[q, pauli])


def sample_error(model: NoiseModel, rng: np.random.Generator) -> PauliString:
    """One independent draw per qubit from its table."""
    cum = np.cumsum(model.table, axis=1)
    u = rng.random(model.n)
    idx = (u[:, None] >= cum[:, :3]).sum(axis=1)
    xz = _XZ_OF_INDEX[idx]
    return PauliString(xz[:, 0], xz[:, 1])


def pauli_index(x: int, z: int) -> int:
    """Map symplectic bits of one qubit to the table column index."""
    return int(_INDEX_OF_XZ[x, z])
