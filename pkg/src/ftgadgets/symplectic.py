"""GF(2) linear algebra on Pauli strings viewed as symplectic vectors."""

from __future__ import annotations

from typing import Sequence

from .pauli import PauliString

__all__ = ["vec", "omega", "solve_gf2", "rank_gf2", "complete_destabilizers", "from_vec"]


def vec(p: PauliString) -> int:
    """Symplectic vector ``x | z << n``."""
    return p.x | (p.z << p.n_qubits)


def from_vec(v: int, n: int) -> PauliString:
    mask = (1 << n) - 1
    return PauliString(n, v & mask, (v >> n) & mask)


def omega(p: PauliString) -> int:
    """Functional with ``parity(omega(p) & vec(q)) == 1`` iff p, q anticommute."""
    return p.z | (p.x << p.n_qubits)


def solve_gf2(rows: Sequence[int], rhs: Sequence[int], nbits: int) -> int | None:
    """Some ``v`` with ``parity(rows[i] & v) == rhs[i]`` for all i, or None."""
    aug = [r | ((b & 1) << nbits) for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    for r in aug:
        for col, prow in pivots:
            if (r >> col) & 1:
                r ^= prow
        low = r & ((1 << nbits) - 1)
        if low == 0:
            if r:
                return None
            continue
        col = low.bit_length() - 1
        # keep earlier pivots reduced so back-substitution is a single pass
        pivots = [(c, p ^ r if (p >> col) & 1 else p) for c, p in pivots]
        pivots.append((col, r))
    v = 0
    for col, prow in pivots:
        if (prow >> nbits) & 1:
            v |= 1 << col
    return v


def rank_gf2(vectors: Sequence[int]) -> int:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def complete_destabilizers(
    stabilizers: Sequence[PauliString], fixed: Sequence[PauliString] = ()
) -> list[PauliString]:
    """Partners ``d_i`` with ``<d_i, s_j> = delta_ij``.

    Every ``d_i`` also commutes with all of ``fixed`` and with the other
    partners.  ``stabilizers`` and ``fixed`` must together be independent and
    the stabilizers must commute with ``fixed``.
    """
    if not stabilizers:
        return []
    n = stabilizers[0].n_qubits
    found: list[PauliString] = []
    for i in range(len(stabilizers)):
        rows = [omega(s) for s in stabilizers] + [omega(f) for f in fixed] + [omega(d) for d in found]
        rhs = [int(j == i) for j in range(len(stabilizers))] + [0] * (len(fixed) + len(found))
        v = solve_gf2(rows, rhs, 2 * n)
        if v is None:
            raise ValueError("stabilizers are dependent; no destabilizer exists")
        found.append(from_vec(v, n))
    return found
