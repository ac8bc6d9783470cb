"""Matrix product states with tracked logarithmic scale.

Site tensors have shape (left_bond, physical, right_bond); the first left
bond and last right bond are 1.  The overall magnitude of a state is kept
in ``log_scale`` so that norms of long chains never leave double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .tensor import LogScalar, svd_truncate

# Relative singular-value floor applied on every truncation sweep, on top of
# any hard bond cap.
SVD_CUTOFF = 1e-14


@dataclass
class MPS:
    sites: list[np.ndarray]
    log_scale: float = 0.0

    def __post_init__(self):
        if not self.sites:
            raise ValueError("MPS needs at least one site")
        if self.sites[0].shape[0] != 1 or self.sites[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for a, b in zip(self.sites, self.sites[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError("adjacent bond dimensions do not match")

    def __len__(self) -> int:
        return len(self.sites)

    @property
    def physical_dims(self) -> list[int]:
        return [t.shape[1] for t in self.sites]

    def max_bond(self) -> int:
        return max(t.shape[2] for t in self.sites)

    def copy(self) -> "MPS":
        return MPS([t.copy() for t in self.sites], self.log_scale)


def product_mps(dims: list[int], fill: str = "uniform") -> MPS:
    """Bond-dimension-1 product state; 'uniform' sites are unit-norm all-ones."""
    sites = []
    for d in dims:
        v = np.ones(d) / math.sqrt(d) if fill == "uniform" else np.ones(d)
        sites.append(v.reshape(1, d, 1))
    return MPS(sites)


def to_dense(m: MPS) -> np.ndarray:
    """Materialize the full tensor (small chains only), scale included."""
    acc = m.sites[0]
    for t in m.sites[1:]:
        acc = np.tensordot(acc, t, axes=([acc.ndim - 1], [0]))
    return acc[0, ..., 0] * math.exp(m.log_scale)


def canonicalize(m: MPS, form: str = "left") -> MPS:
    """Bring to left- or right-canonical form with unit L2 norm.

    The norm is moved into ``log_scale``.  A zero-norm state keeps zero site
    tensors and gets ``log_scale = -inf``.
    """
    sites = [t.copy() for t in m.sites]
    log_scale = m.log_scale
    if form == "left":
        for i in range(len(sites) - 1):
            dl, d, dr = sites[i].shape
            q, r = np.linalg.qr(sites[i].reshape(dl * d, dr))
            sites[i] = q.reshape(dl, d, q.shape[1])
            sites[i + 1] = np.tensordot(r, sites[i + 1], axes=([1], [0]))
        norm = float(np.linalg.norm(sites[-1]))
        last = -1
    elif form == "right":
        for i in range(len(sites) - 1, 0, -1):
            dl, d, dr = sites[i].shape
            r, q = scipy.linalg.rq(sites[i].reshape(dl, d * dr), mode="economic")
            sites[i] = q.reshape(q.shape[0], d, dr)
            sites[i - 1] = np.tensordot(sites[i - 1], r, axes=([2], [0]))
        norm = float(np.linalg.norm(sites[0]))
        last = 0
    else:
        raise ValueError(f"unknown canonical form {form!r}")
    if norm == 0.0:
        return MPS(sites, -math.inf)
    sites[last] = sites[last] / norm
    return MPS(sites, log_scale + math.log(norm))


def mps_inner(a: MPS, b: MPS) -> LogScalar:
    """Inner product <a|b> including both log scales (real tensors)."""
    if len(a) != len(b) or a.physical_dims != b.physical_dims:
        raise ValueError("MPS shapes do not match")
    env = np.ones((1, 1))
    log_acc = a.log_scale + b.log_scale
    sign = 1
    for ta, tb in zip(a.sites, b.sites):
        env = np.tensordot(env, ta, axes=([0], [0]))
        env = np.tensordot(env, tb, axes=([0, 1], [0, 1]))
        scale = float(np.abs(env).max())
        if scale == 0.0:
            return LogScalar(0, 0.0)
        env = env / scale
        log_acc += math.log(scale)
    val = float(env[0, 0])
    if val == 0.0:
        return LogScalar(0, 0.0)
    if val < 0:
        sign = -1
    return LogScalar(sign, log_acc + math.log(abs(val)))


def compress(m: MPS, chi: int, cutoff: float = SVD_CUTOFF) -> tuple[MPS, float]:
    """Truncate every bond to ``chi`` via two-site SVD sweeps.

    The chain is first brought to right-canonical gauge so each left-to-right
    two-site SVD is locally optimal.  Returns the compressed state (unit norm,
    magnitude in log_scale) and the accumulated discarded weight.
    ``chi == 0`` is the exact sentinel: it disables the hard cap and the
    relative singular-value floor, leaving bonds at their true ranks.
    """
    if chi == 0:
        cutoff = 0.0
    work = canonicalize(m, "right")
    if work.log_scale == -math.inf:
        return work, 0.0
    sites = work.sites
    discarded = 0.0
    for i in range(len(sites) - 1):
        theta = np.tensordot(sites[i], sites[i + 1], axes=([2], [0]))
        left, right, dw = svd_truncate(theta, 2, chi, cutoff)
        discarded += dw
        sites[i] = left
        sites[i + 1] = right
    # the sweep leaves the orthogonality center on the last site
    norm = float(np.linalg.norm(sites[-1]))
    if norm == 0.0:
        return MPS(sites, -math.inf), discarded
    sites[-1] = sites[-1] / norm
    return MPS(sites, work.log_scale + math.log(norm)), discarded


def mps_add(a: MPS, b: MPS, wa: float = 1.0, wb: float = 1.0) -> MPS:
    """Weighted sum ``wa*a + wb*b`` by bond direct sum (no compression)."""
    if len(a) != len(b) or a.physical_dims != b.physical_dims:
        raise ValueError("MPS shapes do not match")
    fa = wa * math.exp(a.log_scale)
    fb = wb * math.exp(b.log_scale)
    if len(a) == 1:
        return MPS([fa * a.sites[0] + fb * b.sites[0]])
    sites = []
    for i, (ta, tb) in enumerate(zip(a.sites, b.sites)):
        la, d, ra = ta.shape
        lb, _, rb = tb.shape
        if i == 0:
            t = np.concatenate([fa * ta, fb * tb], axis=2)
        elif i == len(a) - 1:
            t = np.concatenate([ta, tb], axis=0)
        else:
            t = np.zeros((la + lb, d, ra + rb))
            t[:la, :, :ra] = ta
            t[la:, :, ra:] = tb
        sites.append(t)
    return MPS(sites)


def apply_mpo_column(
    m: MPS, column: list[np.ndarray], chi: int
) -> tuple[MPS, float]:
    """Apply one grid column as an MPO and recompress.

    ``column[r]`` has legs (up, left, down, right); its left leg contracts the
    physical leg of site r, the right leg becomes the new physical leg, and
    up/down legs enlarge the bonds.  Bond order after the product is
    (old MPS bond, grid bond) on both sides.  Returns the compressed state
    and the discarded truncation weight.
    """
    if len(column) != len(m):
        raise ValueError("column height does not match MPS length")
    sites = []
    log_scale = m.log_scale
    for site, t in zip(m.sites, column):
        if t.shape[1] != site.shape[1]:
            raise ValueError(
                f"MPO left dimension {t.shape[1]} does not match physical {site.shape[1]}"
            )
        a, _, b = site.shape
        u, _, dn, r = t.shape
        prod = np.tensordot(site, t, axes=([1], [1]))  # (a, b, u, dn, r)
        prod = prod.transpose(0, 2, 4, 1, 3).reshape(a * u, r, b * dn)
        # per-site rescaling keeps long products inside double range; the
        # factor is a power of two so the division is exact
        peak = float(np.abs(prod).max())
        if peak == 0.0:
            log_scale = -math.inf
        else:
            factor = math.ldexp(1.0, math.frexp(peak)[1])
            prod = prod / factor
            log_scale += math.log(factor)
        sites.append(prod)
    if log_scale == -math.inf:
        return MPS(sites, -math.inf), 0.0
    if chi == 0:
        # exact sentinel: keep the raw product; avoids SVD gauge noise at
        # the cost of multiplicative bond growth (small grids only)
        return MPS(sites, log_scale), 0.0
    return compress(MPS(sites, log_scale), chi)
