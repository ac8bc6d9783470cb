"""Dense real tensor primitives with logarithmic scale tracking.

Tensors are plain ``numpy.ndarray`` objects (row-major, real dtype).  What
this module adds on top of numpy is the bookkeeping the contraction engines
need: a sign/log-magnitude scalar type that survives values far outside
double range, pairwise leg contraction with dimension checks, and truncated
SVD splitting with an explicit discarded-weight report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg


class NumericalError(RuntimeError):
    """Raised when a numerical kernel (SVD, ...) fails irrecoverably."""


@dataclass(frozen=True)
class LogScalar:
    """A real scalar stored as ``sign * exp(log_mag)``.

    ``sign`` is -1, 0 or +1; ``log_mag`` is ignored when ``sign == 0``.
    Products of many probabilities underflow doubles quickly, so every
    contraction value in this package is carried in this form.
    """

    sign: int
    log_mag: float = 0.0

    @staticmethod
    def from_float(x: float) -> "LogScalar":
        if x == 0.0:
            return LogScalar(0, 0.0)
        return LogScalar(1 if x > 0 else -1, math.log(abs(x)))

    @staticmethod
    def one() -> "LogScalar":
        return LogScalar(1, 0.0)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_mag)

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0 or other.sign == 0:
            return LogScalar(0, 0.0)
        return LogScalar(self.sign * other.sign, self.log_mag + other.log_mag)

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScalar")
        if self.sign == 0:
            return LogScalar(0, 0.0)
        return LogScalar(self.sign * other.sign, self.log_mag - other.log_mag)

    def scaled(self, factor: float) -> "LogScalar":
        return self * LogScalar.from_float(factor)

    # Ordering follows the represented real value.
    def __lt__(self, other: "LogScalar") -> bool:
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign == 0:
            return False
        if self.sign > 0:
            return self.log_mag < other.log_mag
        return self.log_mag > other.log_mag

    def is_close(self, other: "LogScalar", rel_tol: float = 1e-9) -> bool:
        """Relative comparison in log space (|log ratio| <= rel_tol)."""
        if self.sign != other.sign:
            return self.sign == 0 and other.sign == 0
        if self.sign == 0:
            return True
        return abs(self.log_mag - other.log_mag) <= rel_tol


def contract(a: np.ndarray, legs_a: list[int], b: np.ndarray, legs_b: list[int]) -> np.ndarray:
    """Contract tensors ``a`` and ``b`` over the paired legs.

    Remaining legs keep their order, ``a``'s legs first.  Paired legs must
    have equal dimensions.
    """
    if len(legs_a) != len(legs_b):
        raise ValueError(f"leg lists differ in length: {len(legs_a)} vs {len(legs_b)}")
    for la, lb in zip(legs_a, legs_b):
        if a.shape[la] != b.shape[lb]:
            raise ValueError(
                f"dimension mismatch on legs {la}/{lb}: {a.shape[la]} vs {b.shape[lb]}"
            )
    return np.tensordot(a, b, axes=(legs_a, legs_b))


def _robust_svd(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD with a gesvd fallback; raises NumericalError if both drivers fail."""
    try:
        return np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")
    except Exception as exc:  # pragma: no cover - requires pathological input
        raise NumericalError(f"SVD failed to converge on shape {mat.shape}") from exc


def svd_truncate(
    t: np.ndarray, nleft: int, chi: int, tol: float = 0.0
) -> tuple[np.ndarray, np.ndarray, float]:
    """Split ``t`` across the first ``nleft`` legs, keeping at most ``chi`` values.

    Returns ``(left, right, discarded_weight)`` where ``left`` has the first
    ``nleft`` legs plus a new bond leg, ``right`` carries the bond leg first,
    and ``discarded_weight`` is the sum of squared dropped singular values.
    Singular values below ``tol * max_singular_value`` are dropped as well.
    Singular values are folded into the right factor, so ``left`` is an
    isometry.  ``chi == 0`` means no hard cap.
    """
    if chi < 0:
        raise ValueError("chi must be >= 0")
    if not 0 <= nleft <= t.ndim:
        raise ValueError(f"invalid split {nleft} for rank-{t.ndim} tensor")
    lshape = t.shape[:nleft]
    rshape = t.shape[nleft:]
    mat = t.reshape(int(np.prod(lshape, dtype=np.int64)), -1)
    u, s, vh = _robust_svd(mat)
    keep = len(s)
    if tol > 0.0 and keep > 0 and s[0] > 0.0:
        keep = int(np.count_nonzero(s > tol * s[0]))
    if chi > 0:
        keep = min(keep, chi)
    keep = max(keep, 1)
    discarded = float(np.sum(s[keep:] ** 2))
    left = u[:, :keep].reshape(*lshape, keep)
    right = (s[:keep, None] * vh[:keep]).reshape(keep, *rshape)
    return left, right, discarded
