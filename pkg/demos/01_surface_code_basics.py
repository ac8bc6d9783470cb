"""Surface-code basics: lattice layout, syndromes, pure errors, cosets.

Run:  python3 demos/01_surface_code_basics.py
"""

import numpy as np

from blockbp import (
    LogicalLabel,
    PauliString,
    build_code,
    logical_class,
    pauli_mul,
    pure_error,
    syndrome_of,
)

code = build_code(3)
print(f"distance-3 surface code: n={code.n} qubits, m={code.m} checks, "
      f"grid {code.grid_size}x{code.grid_size}")

print("\nqubit layout (grid coordinates; H = horizontal edge, V = vertical edge):")
for r in range(code.grid_size):
    row = []
    for c in range(code.grid_size):
        if (r, c) in code.qubit_index:
            row.append("H" if r % 2 == 0 else "V")
        elif r % 2 == 0:
            row.append("a")  # Z-type site check
        else:
            row.append("b")  # X-type plaquette check
    print("   " + " ".join(row))

# a single X error on the corner qubit fires exactly one site check
x = np.zeros(code.n, dtype=np.uint8)
x[code.qubit_index[(0, 0)]] = 1
err = PauliString(x, np.zeros(code.n, dtype=np.uint8))
s = syndrome_of(code, err)
print(f"\nsingle X at grid (0,0): syndrome bits set -> "
      f"{[code.a_coords[i] for i in np.flatnonzero(s.bits[:len(code.a_checks)])]}")

# pure errors reproduce any syndrome deterministically
f = pure_error(code, s)
print(f"pure error reproduces it: {syndrome_of(code, f) == s}")

# residuals of candidate corrections live in the four logical cosets
for label, op in [
    ("identity", PauliString.identity(code.n)),
    ("logical X", code.logical_x),
    ("logical Z", code.logical_z),
    ("logical Y", pauli_mul(code.logical_x, code.logical_z)),
]:
    residual = pauli_mul(err, pauli_mul(f, op))
    if syndrome_of(code, residual).is_trivial():
        print(f"residual with {label:<9} -> coset {logical_class(code, residual).value}")
