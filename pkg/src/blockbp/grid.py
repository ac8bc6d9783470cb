"""Rectangular tensor grids: boundary-MPS contraction and tile fusing.

Every grid tensor has legs ordered (up, left, down, right); legs facing the
grid boundary have dimension 1 and are never elided, so all tensors are
rank 4 and blocking/message plumbing stays uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mps import MPS, apply_mpo_column, product_mps
from .tensor import LogScalar, contract

UP, LEFT, DOWN, RIGHT = 0, 1, 2, 3


@dataclass
class GridTN:
    """H x W array of rank-4 tensors with matching interior legs.

    A closed grid (the default) has dimension-1 legs on all four boundaries
    and contracts to a scalar.  ``open_ok=True`` admits grids with dangling
    boundary legs, as produced while sweeping messages toward one side.
    """

    tensors: list[list[np.ndarray]]
    open_ok: bool = False

    def __post_init__(self):
        H, W = self.shape
        for r in range(H):
            if len(self.tensors[r]) != W:
                raise ValueError("ragged tensor rows")
            for c in range(W):
                t = self.tensors[r][c]
                if t.ndim != 4:
                    raise ValueError(f"tensor at {(r, c)} must have 4 legs")
                if not self.open_ok:
                    if r == 0 and t.shape[UP] != 1:
                        raise ValueError(f"top boundary leg at {(r, c)} must be dim 1")
                    if c == 0 and t.shape[LEFT] != 1:
                        raise ValueError(f"left boundary leg at {(r, c)} must be dim 1")
                    if r == H - 1 and t.shape[DOWN] != 1:
                        raise ValueError(f"bottom boundary leg at {(r, c)} must be dim 1")
                    if c == W - 1 and t.shape[RIGHT] != 1:
                        raise ValueError(f"right boundary leg at {(r, c)} must be dim 1")
                if r > 0 and t.shape[UP] != self.tensors[r - 1][c].shape[DOWN]:
                    raise ValueError(f"vertical leg mismatch at {(r, c)}")
                if c > 0 and t.shape[LEFT] != self.tensors[r][c - 1].shape[RIGHT]:
                    raise ValueError(f"horizontal leg mismatch at {(r, c)}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.tensors), len(self.tensors[0])

    def __getitem__(self, rc: tuple[int, int]) -> np.ndarray:
        return self.tensors[rc[0]][rc[1]]

    def scaled(self, r: int, c: int, factor: float) -> "GridTN":
        tensors = [row[:] for row in self.tensors]
        tensors[r][c] = tensors[r][c] * factor
        return GridTN(tensors, self.open_ok)


def boundary_mps(tn: GridTN, chi: int) -> MPS:
    """Absorb all columns left to right; the result is an MPS over the
    right boundary legs (bond cap ``chi``, 0 = uncapped)."""
    H, W = tn.shape
    if any(tn[r, 0].shape[LEFT] != 1 for r in range(H)):
        raise ValueError("sweep start requires a closed left boundary")
    state = product_mps([1] * H, fill="ones")
    for c in range(W):
        state, _ = apply_mpo_column(state, [tn[r, c] for r in range(H)], chi)
        if state.log_scale == -math.inf:
            return state
    return state


def close_boundary(state: MPS) -> LogScalar:
    """Collapse an all-physical-dimension-1 boundary MPS to its value."""
    if state.log_scale == -math.inf:
        return LogScalar(0, 0.0)
    env = np.ones((1, 1))
    log_acc = state.log_scale
    for t in state.sites:
        if t.shape[1] != 1:
            raise ValueError("boundary MPS still has open physical legs")
        env = env @ t[:, 0, :]
        peak = float(np.abs(env).max())
        if peak == 0.0:
            return LogScalar(0, 0.0)
        scale = math.ldexp(1.0, math.frexp(peak)[1])  # power of two: exact division
        env = env / scale
        log_acc += math.log(scale)
    val = float(env[0, 0])
    if val == 0.0:
        return LogScalar(0, 0.0)
    return LogScalar(1 if val > 0 else -1, log_acc + math.log(abs(val)))


def bmps_contract(tn: GridTN, chi: int) -> LogScalar:
    """Contract the grid column by column, left to right.

    The running boundary is an MPS over the rows, truncated to bond
    dimension ``chi`` after each column; ``chi == 0`` disables the cap
    (exact up to the relative singular-value floor).
    """
    return close_boundary(boundary_mps(tn, chi))


def _edge_id(r: int, c: int, leg: int) -> tuple:
    """Canonical id of the lattice edge a leg lives on."""
    if leg == UP:
        return ("v", r, c)
    if leg == DOWN:
        return ("v", r + 1, c)
    if leg == LEFT:
        return ("h", r, c)
    return ("h", r, c + 1)


def contract_region(tn: GridTN, r0: int, r1: int, c0: int, c1: int) -> np.ndarray:
    """Exactly contract the cells ``[r0, r1) x [c0, c1)``.

    Returns a rank-4 tensor whose legs fuse the region's outward-facing legs
    per side, ordered (up, left, down, right) with tile-internal coordinate
    order inside each fused leg.
    """
    acc: np.ndarray | None = None
    acc_ids: list[tuple] = []
    for r in range(r0, r1):
        for c in range(c0, c1):
            t = tn[r, c]
            ids = [_edge_id(r, c, leg) for leg in range(4)]
            if acc is None:
                acc, acc_ids = t, ids
                continue
            shared = [i for i in ids if i in acc_ids]
            axes_acc = [acc_ids.index(i) for i in shared]
            axes_t = [ids.index(i) for i in shared]
            acc = contract(acc, axes_acc, t, axes_t)
            acc_ids = [i for i in acc_ids if i not in shared] + [
                i for i in ids if i not in shared
            ]
    assert acc is not None
    up_ids = [("v", r0, c) for c in range(c0, c1)]
    left_ids = [("h", r, c0) for r in range(r0, r1)]
    down_ids = [("v", r1, c) for c in range(c0, c1)]
    right_ids = [("h", r, c1) for r in range(r0, r1)]
    order = up_ids + left_ids + down_ids + right_ids
    perm = [acc_ids.index(i) for i in order]
    acc = acc.transpose(perm)
    dims = acc.shape

    def fused(n0: int, n1: int) -> int:
        return int(np.prod(dims[n0:n1], dtype=np.int64))

    k = len(up_ids)
    h = len(left_ids)
    return acc.reshape(fused(0, k), fused(k, k + h), fused(k + h, 2 * k + h), fused(2 * k + h, 2 * (k + h)))


def tile_extents(length: int, k: int) -> list[tuple[int, int]]:
    """Greedy k-sized tiling from the start; the last tile may be smaller."""
    if k < 1:
        raise ValueError("tile size must be >= 1")
    return [(i, min(i + k, length)) for i in range(0, length, k)]


def fuse_grid(tn: GridTN, k: int) -> GridTN:
    """Coarse-grain by contracting k x k tiles into single tensors.

    Edge tiles may be smaller when k does not divide the grid size.  Fused
    leg indices enumerate the tile's crossing legs in coordinate order.
    """
    if k == 1:
        return GridTN([row[:] for row in tn.tensors])
    H, W = tn.shape
    rows = tile_extents(H, k)
    cols = tile_extents(W, k)
    tensors = [
        [contract_region(tn, r0, r1, c0, c1) for (c0, c1) in cols]
        for (r0, r1) in rows
    ]
    return GridTN(tensors)
