"""Coset tensor networks for the surface code.

For a coset representative e = f * L the network is a (2d-1) x (2d-1) grid
whose contraction equals the total probability of the coset e*G.  Each
stabilizer-generator node carries a copy (delta) tensor whose binary value
switches that generator on or off; each qubit node carries the per-qubit
probability of e_q composed with the Z/X pattern its neighboring generators
apply.  Summing over all leg assignments therefore sums pi(e*g) over the
whole group, because the generators are independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import LogicalLabel, PauliString, SurfaceCode, logical_rep, pauli_mul
from .grid import DOWN, LEFT, RIGHT, UP, GridTN
from .noise import NoiseModel, pauli_index
from .tensor import LogScalar

ENUMERATION_LIMIT = 24  # checks; exact coset sums enumerate 2^m group elements


@dataclass
class CosetNetwork:
    grid: GridTN
    coset_pauli: PauliString


def _delta_tensor(dims: tuple[int, int, int, int]) -> np.ndarray:
    """Copy tensor: entry 1 iff all non-trivial legs carry the same value."""
    t = np.zeros(dims)
    for v in (0, 1):
        t[tuple(0 if d == 1 else v for d in dims)] = 1.0
    return t


def _qubit_tensor(
    model: NoiseModel, q: int, ex: int, ez: int, dims: tuple[int, int, int, int], vertical: bool
) -> np.ndarray:
    """Qubit node: entry = pi_q of e_q composed with the generator pattern.

    Site (Z-type) generators act through the legs toward site nodes, adding
    Z when the two leg values differ; plaquette (X-type) generators act the
    same way through the legs toward plaquette nodes.  On a horizontal qubit
    the site nodes sit left/right; on a vertical qubit they sit up/down.
    Boundary legs have dimension 1 and contribute exponent 0.
    """
    t = np.empty(dims)
    for u in range(dims[UP]):
        for l in range(dims[LEFT]):
            for dn in range(dims[DOWN]):
                for r in range(dims[RIGHT]):
                    if vertical:
                        z_flip, x_flip = u ^ dn, l ^ r
                    else:
                        z_flip, x_flip = l ^ r, u ^ dn
                    t[u, l, dn, r] = model.table[q, pauli_index(ex ^ x_flip, ez ^ z_flip)]
    return t


def build_coset_network(
    code: SurfaceCode, model: NoiseModel, f: PauliString, label: LogicalLabel
) -> CosetNetwork:
    """Build the grid network whose contraction is pi(f * L * G)."""
    if f.n != code.n:
        raise ValueError(f"Pauli length {f.n} does not match code n={code.n}")
    if model.n != code.n:
        raise ValueError(f"noise model size {model.n} does not match code n={code.n}")
    e = pauli_mul(f, logical_rep(code, label))
    size = code.grid_size

    def leg_dim(r: int, c: int) -> int:
        return 1 if not (0 <= r < size and 0 <= c < size) else 2

    tensors: list[list[np.ndarray]] = []
    for r in range(size):
        row = []
        for c in range(size):
            dims = (
                leg_dim(r - 1, c),
                leg_dim(r, c - 1),
                leg_dim(r + 1, c),
                leg_dim(r, c + 1),
            )
            if (r + c) % 2 == 1:
                row.append(_delta_tensor(dims))
            else:
                q = code.qubit_index[(r, c)]
                vertical = r % 2 == 1
                row.append(
                    _qubit_tensor(model, q, int(e.x_bits[q]), int(e.z_bits[q]), dims, vertical)
                )
        tensors.append(row)
    return CosetNetwork(grid=GridTN(tensors), coset_pauli=e)


_GROUP_CACHE_LIMIT = 16  # cache the element tables only when 2^m stays small
_LOG_FLOOR = -1000.0  # stands in for log(0); exp underflows to exactly 0.0

# composition table: pauli index of (a * b), phase free
_COMPOSE = np.array(
    [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]], dtype=np.uint8
)


def _pauli_idx(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.where(x == 1, np.where(z == 1, 2, 1), np.where(z == 1, 3, 0))


def _group_chunk(code: SurfaceCode, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """x/z bit matrices of stabilizer group elements ``start..stop-1``."""
    m = code.m
    sel = ((np.arange(start, stop, dtype=np.int64)[:, None] >> np.arange(m)) & 1).astype(np.int64)
    gx = (sel @ code.check_x.astype(np.int64)) % 2
    gz = (sel @ code.check_z.astype(np.int64)) % 2
    return gx.astype(np.uint8), gz.astype(np.uint8)


def _group_tables(code: SurfaceCode) -> tuple[np.ndarray, np.ndarray]:
    cached = getattr(code, "_group_tables", None)
    if cached is None:
        cached = _group_chunk(code, 0, 1 << code.m)
        if code.m <= _GROUP_CACHE_LIMIT:
            code._group_tables = cached
    return cached


def _group_onehot(code: SurfaceCode) -> np.ndarray:
    """One-hot Pauli indicators of all group elements, shape (2^m, n*4)."""
    cached = getattr(code, "_group_onehot", None)
    if cached is None:
        gx, gz = _group_tables(code)
        idx = _pauli_idx(gx, gz)
        cached = np.eye(4)[idx].reshape(1 << code.m, -1)
        code._group_onehot = cached
    return cached


def coset_prob_exact(
    code: SurfaceCode, model: NoiseModel, f: PauliString, label: LogicalLabel
) -> LogScalar:
    """Brute-force coset probability: sum pi(e*g) over every group element."""
    if code.m > ENUMERATION_LIMIT:
        raise ValueError(f"exact enumeration supports m <= {ENUMERATION_LIMIT}, got m={code.m}")
    e = pauli_mul(f, logical_rep(code, label))
    if code.m <= _GROUP_CACHE_LIMIT:
        # log-space path: per-element log probability via one matmul against
        # the precomputed one-hot indicators; a log floor of -1000 stands in
        # for log(0) and underflows back to an exact 0 term
        e_idx = _pauli_idx(e.x_bits, e.z_bits)
        composed = model.table[np.arange(code.n)[:, None], _COMPOSE[e_idx]]
        logs = np.full_like(composed, _LOG_FLOOR)
        positive = composed > 0.0
        logs[positive] = np.log(composed[positive])
        log_terms = _group_onehot(code) @ logs.reshape(-1)
        total = float(np.exp(log_terms).sum())
        return LogScalar.from_float(total)
    qubits = np.arange(code.n)[None, :]
    total = 0.0
    chunk = 1 << min(code.m, 18)
    for start in range(0, 1 << code.m, chunk):
        gx, gz = _group_chunk(code, start, start + chunk)
        ex = gx ^ e.x_bits[None, :]
        ez = gz ^ e.z_bits[None, :]
        idx = _pauli_idx(ex, ez)
        total += float(np.prod(model.table[qubits, idx], axis=1).sum())
    return LogScalar.from_float(total)
