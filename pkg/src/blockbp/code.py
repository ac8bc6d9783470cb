"""Planar surface-code lattice: Pauli strings, checks, syndromes and cosets.

The distance-``d`` code lives on an open square lattice with ``d^2``
horizontal and ``(d-1)^2`` vertical edge qubits.  Grid coordinates use the
``(2d-1) x (2d-1)`` layout: horizontal qubits at (even, even), vertical
qubits at (odd, odd), Z-type site checks at (even, odd) and X-type
plaquette checks at (odd, even).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class LogicalLabel(enum.Enum):
    """Logical coset label; composition is the Klein four-group."""

    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def has_x(self) -> bool:
        return self in (LogicalLabel.X, LogicalLabel.Y)

    @property
    def has_z(self) -> bool:
        return self in (LogicalLabel.Z, LogicalLabel.Y)


LABEL_ORDER = (LogicalLabel.I, LogicalLabel.X, LogicalLabel.Y, LogicalLabel.Z)


@dataclass(frozen=True)
class PauliString:
    """Phase-free n-qubit Pauli in symplectic form.

    Qubit q carries X iff ``x_bits[q]``, Z iff ``z_bits[q]``, Y iff both.
    Global phases are not represented: coset probabilities are phase blind.
    """

    x_bits: np.ndarray
    z_bits: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x_bits, dtype=np.uint8) & 1
        z = np.ascontiguousarray(self.z_bits, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x_bits and z_bits must be 1-d vectors of equal length")
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)

    @staticmethod
    def identity(n: int) -> "PauliString":
        return PauliString(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.x_bits.shape[0]

    def weight(self) -> int:
        return int(np.count_nonzero(self.x_bits | self.z_bits))

    def commutes_with(self, other: "PauliString") -> bool:
        return self.symplectic(other) == 0

    def symplectic(self, other: "PauliString") -> int:
        """Symplectic product: 1 iff the two operators anticommute."""
        if self.n != other.n:
            raise ValueError("length mismatch")
        return int((np.dot(self.x_bits, other.z_bits) + np.dot(self.z_bits, other.x_bits)) % 2)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and np.array_equal(self.x_bits, other.x_bits)
            and np.array_equal(self.z_bits, other.z_bits)
        )


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Phase-free Pauli product: component-wise XOR of both bit vectors."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    return PauliString(a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits)


@dataclass(frozen=True)
class Syndrome:
    """Check outcomes, Z-type site checks first, then X-type plaquette checks.

    Both groups are ordered row-major over their grid nodes.
    """

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "bits", np.ascontiguousarray(self.bits, dtype=np.uint8) & 1
        )

    @property
    def m(self) -> int:
        return self.bits.shape[0]

    def is_trivial(self) -> bool:
        return not self.bits.any()

    def __eq__(self, other) -> bool:
        return isinstance(other, Syndrome) and np.array_equal(self.bits, other.bits)

    def to_hex(self) -> str:
        """Hex wire format: LSB-first within bytes, byte 0 first."""
        return np.packbits(self.bits, bitorder="little").tobytes().hex()

    @staticmethod
    def from_hex(hexstr: str, m: int) -> "Syndrome":
        raw = bytes.fromhex(hexstr)
        if len(raw) != (m + 7) // 8:
            raise ValueError(f"expected {(m + 7) // 8} bytes for m={m}, got {len(raw)}")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:m]
        if bits[m:].any():
            raise ValueError("padding bits beyond syndrome length must be zero")
        return Syndrome(bits)


@dataclass
class SurfaceCode:
    """Distance-d surface code on the open square lattice."""

    d: int
    n: int
    m: int
    qubit_coords: list[tuple[int, int]]
    qubit_index: dict[tuple[int, int], int]
    a_checks: list[np.ndarray]  # qubit supports of the Z-type site checks
    b_checks: list[np.ndarray]  # qubit supports of the X-type plaquette checks
    a_coords: list[tuple[int, int]]
    b_coords: list[tuple[int, int]]
    logical_x: PauliString
    logical_z: PauliString
    # m x n parity matrices: syndrome = (check_x @ z + check_z @ x) mod 2
    check_x: np.ndarray = field(repr=False)
    check_z: np.ndarray = field(repr=False)

    @property
    def grid_size(self) -> int:
        return 2 * self.d - 1

    def check_pauli(self, i: int) -> PauliString:
        """The i-th check as a PauliString (A-checks first, then B-checks)."""
        return PauliString(self.check_x[i], self.check_z[i])


def _adjacent_qubits(code_size: int, r: int, c: int, index: dict) -> list[int]:
    out = []
    for rr, cc in ((r - 1, c), (r, c - 1), (r + 1, c), (r, c + 1)):
        if 0 <= rr < code_size and 0 <= cc < code_size and (rr, cc) in index:
            out.append(index[(rr, cc)])
    return out


def build_code(d: int) -> SurfaceCode:
    """Construct the distance-d surface code, d >= 2."""
    if d < 2:
        raise ValueError(f"code distance must be >= 2, got {d}")
    size = 2 * d - 1
    qubit_coords: list[tuple[int, int]] = []
    qubit_index: dict[tuple[int, int], int] = {}
    for r in range(size):
        for c in range(size):
            if (r % 2 == 0 and c % 2 == 0) or (r % 2 == 1 and c % 2 == 1):
                qubit_index[(r, c)] = len(qubit_coords)
                qubit_coords.append((r, c))
    n = len(qubit_coords)
    assert n == d * d + (d - 1) * (d - 1)

    a_checks, a_coords = [], []
    b_checks, b_coords = [], []
    for r in range(size):
        for c in range(size):
            if r % 2 == 0 and c % 2 == 1:
                a_coords.append((r, c))
                a_checks.append(np.array(_adjacent_qubits(size, r, c, qubit_index)))
            elif r % 2 == 1 and c % 2 == 0:
                b_coords.append((r, c))
                b_checks.append(np.array(_adjacent_qubits(size, r, c, qubit_index)))
    m = len(a_checks) + len(b_checks)
    assert m == 2 * d * (d - 1)

    check_x = np.zeros((m, n), dtype=np.uint8)
    check_z = np.zeros((m, n), dtype=np.uint8)
    for i, sup in enumerate(a_checks):
        check_z[i, sup] = 1
    for i, sup in enumerate(b_checks):
        check_x[len(a_checks) + i, sup] = 1

    lx = np.zeros(n, dtype=np.uint8)
    for c in range(0, size, 2):
        lx[qubit_index[(0, c)]] = 1
    lz = np.zeros(n, dtype=np.uint8)
    for r in range(0, size, 2):
        lz[qubit_index[(r, 0)]] = 1
    logical_x = PauliString(lx, np.zeros(n, dtype=np.uint8))
    logical_z = PauliString(np.zeros(n, dtype=np.uint8), lz)

    return SurfaceCode(
        d=d,
        n=n,
        m=m,
        qubit_coords=qubit_coords,
        qubit_index=qubit_index,
        a_checks=a_checks,
        b_checks=b_checks,
        a_coords=a_coords,
        b_coords=b_coords,
        logical_x=logical_x,
        logical_z=logical_z,
        check_x=check_x,
        check_z=check_z,
    )


def syndrome_of(code: SurfaceCode, p: PauliString) -> Syndrome:
    """Syndrome of ``p``: bit i is 1 iff ``p`` anticommutes with check i."""
    if p.n != code.n:
        raise ValueError(f"Pauli length {p.n} does not match code n={code.n}")
    bits = (code.check_x @ p.z_bits.astype(np.int64) + code.check_z @ p.x_bits.astype(np.int64)) % 2
    return Syndrome(bits.astype(np.uint8))


def pure_error(code: SurfaceCode, s: Syndrome) -> PauliString:
    """A deterministic Pauli string whose syndrome is ``s``.

    Violated site checks are routed to the left boundary with X on the
    horizontal qubits of their row; violated plaquette checks are routed to
    the top boundary with Z on the horizontal qubits of their column.
    """
    if s.m != code.m:
        raise ValueError(f"syndrome length {s.m} does not match m={code.m}")
    x = np.zeros(code.n, dtype=np.uint8)
    z = np.zeros(code.n, dtype=np.uint8)
    na = len(code.a_checks)
    for i in np.flatnonzero(s.bits[:na]):
        r, c = code.a_coords[i]
        for cc in range(0, c, 2):
            x[code.qubit_index[(r, cc)]] ^= 1
    for i in np.flatnonzero(s.bits[na:]):
        r, c = code.b_coords[i]
        for rr in range(0, r, 2):
            z[code.qubit_index[(rr, c)]] ^= 1
    return PauliString(x, z)


def logical_class(code: SurfaceCode, p: PauliString) -> LogicalLabel:
    """Coset label of a Pauli in the centralizer (trivial syndrome required)."""
    if not syndrome_of(code, p).is_trivial():
        raise ValueError("Pauli has nonzero syndrome; it is not in the centralizer")
    has_x = p.symplectic(code.logical_z) == 1
    has_z = p.symplectic(code.logical_x) == 1
    if has_x and has_z:
        return LogicalLabel.Y
    if has_x:
        return LogicalLabel.X
    if has_z:
        return LogicalLabel.Z
    return LogicalLabel.I


def logical_rep(code: SurfaceCode, label: LogicalLabel) -> PauliString:
    """A fixed representative Pauli for each logical label."""
    rep = PauliString.identity(code.n)
    if label.has_x:
        rep = pauli_mul(rep, code.logical_x)
    if label.has_z:
        rep = pauli_mul(rep, code.logical_z)
    return rep
