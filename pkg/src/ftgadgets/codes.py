"""Data and ancilla codes: stabilizer, generic (explicit codeword), concatenated.

All codes encode one logical qubit.  Logical basis convention: ``|1>`` is
``X_L |0>`` for stabilizer codes; generic codes give both codewords
explicitly and use the transversal strings ``X^n``/``Z^n`` as logicals.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .pauli import DimensionError, PauliString, paulis_of_weight
from .statevector import (
    IMPOSSIBLE,
    DenseState,
    measure_pauli,
    pauli_action,
    apply_pauli,
)
from .symplectic import complete_destabilizers, rank_gf2, solve_gf2, vec

__all__ = [
    "CodeFormatError",
    "RecoveryError",
    "StabilizerCode",
    "ConcatenatedCode",
    "GenericCode",
    "Code",
    "ValidationReport",
    "ParityReport",
    "SupportResult",
    "RecoveryBranch",
    "validate",
    "check_parity_property",
    "restricted_parity_support",
    "encode",
    "concatenate",
    "ideal_recover",
    "steane",
    "five_qubit",
    "repetition",
    "builtin",
    "load_code",
    "code_from_dict",
    "code_to_dict",
    "STATE_LABELS",
]

CODE_SCHEMA = "ftgadgets.code/1"
MAX_ENUMERATION_QUBITS = 16
STATE_LABELS = ("zero", "one", "plus", "minus", "plus_i", "minus_i")


class CodeFormatError(ValueError):
    """Malformed code definition (wrong dimensions, unknown fields)."""


class RecoveryError(RuntimeError):
    """State has no overlap with any correctable error space."""


def _all_z(n: int) -> PauliString:
    return PauliString(n, 0, (1 << n) - 1)


def _all_x(n: int) -> PauliString:
    return PauliString(n, (1 << n) - 1, 0)


def _all_y(n: int) -> PauliString:
    full = (1 << n) - 1
    return PauliString(n, full, full)


def _apply_to_basis(p: PauliString, b: int) -> tuple[int, complex]:
    sign = -1 if (p.z & b).bit_count() & 1 else 1
    return b ^ p.x, sign * (1j ** p.xz_phase)


# ---------------------------------------------------------------------------
# stabilizer codes


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    name: str
    n: int
    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    distance: int
    transversal_z: bool | None = None  # claimed flag; validated, never trusted

    is_stabilizer = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        for p in (*self.generators, self.logical_x, self.logical_z):
            if p.n_qubits != self.n:
                raise CodeFormatError(
                    f"{self.name}: {p} acts on {p.n_qubits} qubits, code has n={self.n}"
                )

    def __repr__(self) -> str:
        return f"StabilizerCode({self.name!r}, n={self.n}, d={self.distance})"

    # ---- derived operators -------------------------------------------
    @cached_property
    def logical_y(self) -> PauliString:
        xz = self.logical_x * self.logical_z
        return xz.with_phase(xz.phase_exp + 1)

    @cached_property
    def destabilizers(self) -> tuple[PauliString, ...]:
        return tuple(
            complete_destabilizers(self.generators, fixed=(self.logical_x, self.logical_z))
        )

    def syndrome(self, p: PauliString) -> int:
        """Bit i set iff ``p`` anticommutes with generator i."""
        s = 0
        for i, g in enumerate(self.generators):
            if ((p.x & g.z) ^ (p.z & g.x)).bit_count() & 1:
                s |= 1 << i
        return s

    def logical_action(self, p: PauliString) -> tuple[int, int]:
        """(X_L component, Z_L component) of ``p`` modulo stabilizers and errors."""
        ax = 0 if p.commutes(self.logical_z) else 1
        az = 0 if p.commutes(self.logical_x) else 1
        return ax, az

    def stabilizer_sign(self, p: PauliString) -> int | None:
        """+1 / -1 if ``p`` / ``-p`` is in the stabilizer group, else None."""
        if self.syndrome(p) or self.logical_action(p) != (0, 0):
            return None
        prod = PauliString(self.n)
        for g, d in zip(self.generators, self.destabilizers):
            if not p.commutes(d):
                prod = prod * g
        if (prod.x, prod.z) != (p.x, p.z):
            return None
        rel = (p.phase_exp - prod.phase_exp) % 4
        return {0: 1, 2: -1}.get(rel)

    def in_stabilizer(self, p: PauliString) -> bool:
        return self.stabilizer_sign(p.unsigned()) is not None

    @cached_property
    def stabilizer_elements(self) -> tuple[PauliString, ...]:
        if len(self.generators) > MAX_ENUMERATION_QUBITS:
            raise ValueError(f"{self.name}: stabilizer group too large to enumerate")
        elems = [PauliString(self.n)]
        for g in self.generators:
            elems += [e * g for e in elems]
        return tuple(elems)

    def min_weight_representative(self, p: PauliString) -> PauliString:
        """Lowest-weight unsigned element of ``p * S`` (ties: smallest text)."""
        return min(((p * s).unsigned() for s in self.stabilizer_elements), key=PauliString.sort_key)

    # ---- decoding ----------------------------------------------------
    @cached_property
    def _decoder_table(self) -> dict[int, PauliString]:
        if self.n > MAX_ENUMERATION_QUBITS:
            raise ValueError(f"{self.name}: lookup decoder limited to {MAX_ENUMERATION_QUBITS} qubits")
        table: dict[int, PauliString] = {}
        target = 1 << len(self.generators)
        for w in range(self.n + 1):
            cands = [PauliString(self.n)] if w == 0 else paulis_of_weight(self.n, w)
            for p in cands:
                table.setdefault(self.syndrome(p), p)
            if len(table) == target:
                break
        return table

    def decode(self, syndrome: int) -> PauliString:
        """Minimum-weight Pauli with this syndrome; ties go to the smallest text."""
        return self._decoder_table[syndrome]

    # ---- codewords ---------------------------------------------------
    def _zero_stabilizers(self) -> list[PauliString]:
        return [*self.generators, self.logical_z]

    @cached_property
    def _sparse_zero(self) -> dict[int, complex]:
        x_rows: list[PauliString] = []
        z_rows: list[PauliString] = []
        for r in self._zero_stabilizers():
            for piv in x_rows:
                top = piv.x.bit_length() - 1
                if (r.x >> top) & 1:
                    r = r * piv
            if r.x:
                x_rows.append(r)
            else:
                z_rows.append(r)
        rhs = []
        for r in z_rows:
            if r.phase_exp not in (0, 2):
                raise CodeFormatError(f"{self.name}: non-Hermitian stabilizer {r}")
            rhs.append(r.phase_exp // 2)
        x0 = solve_gf2([r.z for r in z_rows], rhs, self.n)
        if x0 is None:
            raise CodeFormatError(f"{self.name}: inconsistent stabilizer signs")
        terms: dict[int, complex] = {x0: 1.0 + 0j}
        for g in x_rows:
            new = dict(terms)
            for b, a in terms.items():
                b2, f = _apply_to_basis(g, b)
                new[b2] = new.get(b2, 0) + f * a
            terms = {b: a for b, a in new.items() if abs(a) > 1e-12}
        norm = np.sqrt(sum(abs(a) ** 2 for a in terms.values()))
        return {b: a / norm for b, a in sorted(terms.items())}

    def sparse_codeword(self, bit: int) -> dict[int, complex]:
        zero = self._sparse_zero
        if bit == 0:
            return dict(zero)
        out = {}
        for b, a in zero.items():
            b2, f = _apply_to_basis(self.logical_x, b)
            out[b2] = f * a
        return dict(sorted(out.items()))

    def codeword(self, bit: int) -> np.ndarray:
        if self.n > 24:
            raise ValueError(f"{self.name}: dense codeword of {self.n} qubits refused")
        v = np.zeros(1 << self.n, dtype=complex)
        for b, a in self.sparse_codeword(bit).items():
            v[b] = a
        return v

    def encode(self, alpha: complex, beta: complex) -> DenseState:
        return encode(self, alpha, beta)

    def state_stabilizers(self, label: str) -> list[PauliString]:
        """Stabilizer generators of the encoded single-qubit Pauli eigenstate."""
        op = {
            "zero": self.logical_z,
            "one": -self.logical_z,
            "plus": self.logical_x,
            "minus": -self.logical_x,
            "plus_i": self.logical_y,
            "minus_i": -self.logical_y,
        }[label]
        return [*self.generators, op]

    # ---- transversality ----------------------------------------------
    @cached_property
    def transversal_z_holds(self) -> bool:
        return self.stabilizer_sign(self.logical_z * _all_z(self.n)) == 1

    @cached_property
    def transversal_y_sign(self) -> int | None:
        """s with ``Y^n = s * Y_L`` on the codespace, or None."""
        return self.stabilizer_sign(self.logical_y * _all_y(self.n))

    @cached_property
    def is_css(self) -> bool:
        return all(g.x == 0 or g.z == 0 for g in self.generators)

    @cached_property
    def transversal_h_is_logical(self) -> bool:
        """Whether ``H^n`` preserves the code and swaps X_L, Z_L (up to stabilizers)."""
        from .pauli import CliffordGate, GateKind, conjugate

        def h_all(p: PauliString) -> PauliString:
            for q in range(self.n):
                p = conjugate(CliffordGate(GateKind.H, (q,)), p)
            return p

        if any(self.stabilizer_sign(h_all(g)) != 1 for g in self.generators):
            return False
        return (
            self.stabilizer_sign(h_all(self.logical_x) * self.logical_z) == 1
            and self.stabilizer_sign(h_all(self.logical_z) * self.logical_x) == 1
        )

    def z_type_logicals(self) -> list[PauliString]:
        """Z-type elements of ``Z_L * S``, sorted by (weight, support)."""
        out = []
        for s in self.stabilizer_elements:
            p = (self.logical_z * s).unsigned()
            if p.x == 0:
                out.append(p)
        out.sort(key=lambda p: (p.weight, p.support))
        return out


@dataclass(frozen=True, eq=False)
class ConcatenatedCode(StabilizerCode):
    """Outer stabilizer code with each qubit encoded in a bit-flip repetition block.

    Block ``j`` occupies qubits ``j*L .. j*L+L-1``.  Inner logical X is ``X^L``
    on the block, inner logical Z is ``Z`` on the block's first qubit.
    """

    outer: StabilizerCode | None = None
    inner_length: int = 1

    def __repr__(self) -> str:
        return f"ConcatenatedCode({self.outer.name!r} o rep{self.inner_length}, n={self.n})"

    @property
    def m(self) -> int:
        return self.outer.n

    def block(self, j: int) -> tuple[int, ...]:
        L = self.inner_length
        return tuple(range(j * L, (j + 1) * L))

    def lift(self, p: PauliString) -> PauliString:
        """Replace each outer letter by the corresponding inner logical."""
        L = self.inner_length
        x = z = 0
        block_mask = (1 << L) - 1
        for j in range(self.m):
            if (p.x >> j) & 1:
                x |= block_mask << (j * L)
            if (p.z >> j) & 1:
                z |= 1 << (j * L)
        return PauliString(self.n, x, z, p.phase_exp)

    @property
    def n_inner_generators(self) -> int:
        return self.m * (self.inner_length - 1)

    def decode(self, syndrome: int) -> PauliString:
        """Majority vote inside each block, then the outer lookup decoder."""
        L = self.inner_length
        x_corr = 0
        for j in range(self.m):
            bits = (syndrome >> (j * (L - 1))) & ((1 << (L - 1)) - 1)
            e, pattern = 0, 0
            for i in range(L - 1):
                e ^= (bits >> i) & 1
                pattern |= e << (i + 1)
            flipped = pattern ^ ((1 << L) - 1)
            # tie keeps `pattern` (its text starts with I, hence sorts first)
            if flipped.bit_count() < pattern.bit_count():
                pattern = flipped
            x_corr |= pattern << (j * L)
        inner = PauliString(self.n, x_corr, 0)
        outer_syn = syndrome >> self.n_inner_generators
        k = self.n_inner_generators
        for i in range(len(self.outer.generators)):
            g = self.generators[k + i]
            if not inner.commutes(g):
                outer_syn ^= 1 << i
        outer_corr = self.outer.decode(outer_syn)
        return (self.lift(outer_corr) * inner).unsigned()

    def z_type_logicals(self) -> list[PauliString]:
        """Lifts of the outer code's Z-type logicals (one Z per hooked block)."""
        return [self.lift(p) for p in self.outer.z_type_logicals()]

    @cached_property
    def stabilizer_elements(self) -> tuple[PauliString, ...]:
        raise ValueError(f"{self!r}: stabilizer group too large to enumerate")


def concatenate(outer: StabilizerCode, inner_repetition_length: int) -> ConcatenatedCode:
    if inner_repetition_length < 1:
        raise ValueError("inner repetition length must be positive")
    if outer.transversal_z_holds is False:
        raise ValueError(f"outer code {outer.name} lacks transversal Z")
    m, L = outer.n, inner_repetition_length
    n = m * L
    gens = []
    for j in range(m):
        for i in range(L - 1):
            q = j * L + i
            gens.append(PauliString(n, 0, (1 << q) | (1 << (q + 1))))
    proto = ConcatenatedCode(
        name=f"{outer.name}*rep{L}", n=n, generators=tuple(gens),
        logical_x=PauliString(n), logical_z=PauliString(n), distance=outer.distance,
        outer=outer, inner_length=L,
    )
    gens += [proto.lift(g) for g in outer.generators]
    return ConcatenatedCode(
        name=f"{outer.name}*rep{L}", n=n, generators=tuple(gens),
        logical_x=proto.lift(outer.logical_x), logical_z=proto.lift(outer.logical_z),
        distance=outer.distance, transversal_z=None, outer=outer, inner_length=L,
    )


# ---------------------------------------------------------------------------
# generic codes


@dataclass(frozen=True, eq=False)
class GenericCode:
    name: str
    n: int
    codeword_zero: np.ndarray
    codeword_one: np.ndarray
    distance: int
    transversal_z: bool | None = None

    is_stabilizer = False

    def __post_init__(self) -> None:
        dim = 1 << self.n
        for label, v in (("codeword_zero", self.codeword_zero), ("codeword_one", self.codeword_one)):
            arr = np.asarray(v, dtype=complex)
            if arr.shape != (dim,):
                raise CodeFormatError(f"{self.name}: {label} has shape {arr.shape}, expected ({dim},)")
            object.__setattr__(self, label, arr)

    def __repr__(self) -> str:
        return f"GenericCode({self.name!r}, n={self.n}, d={self.distance})"

    @property
    def logical_x(self) -> PauliString:
        return _all_x(self.n)

    @property
    def logical_z(self) -> PauliString:
        return _all_z(self.n)

    def codeword(self, bit: int) -> np.ndarray:
        return (self.codeword_one if bit else self.codeword_zero).copy()

    def sparse_codeword(self, bit: int) -> dict[int, complex]:
        v = self.codeword_one if bit else self.codeword_zero
        return {int(b): complex(v[b]) for b in np.flatnonzero(np.abs(v) > 1e-12)}

    def encode(self, alpha: complex, beta: complex) -> DenseState:
        return encode(self, alpha, beta)

    def _acts_as(self, p: PauliString, target0: np.ndarray, target1: np.ndarray, atol=1e-9) -> bool:
        return np.allclose(pauli_action(self.codeword_zero, p), target0, atol=atol) and np.allclose(
            pauli_action(self.codeword_one, p), target1, atol=atol
        )

    @cached_property
    def transversal_z_holds(self) -> bool:
        return self._acts_as(_all_z(self.n), self.codeword_zero, -self.codeword_one)

    @cached_property
    def transversal_x_holds(self) -> bool:
        return self._acts_as(_all_x(self.n), self.codeword_one, self.codeword_zero)

    @cached_property
    def transversal_y_sign(self) -> int | None:
        # Y_L|0> = i|1>, Y_L|1> = -i|0>
        y = _all_y(self.n)
        for s in (1, -1):
            if self._acts_as(y, s * 1j * self.codeword_one, -s * 1j * self.codeword_zero):
                return s
        return None

    @property
    def correctable_weight(self) -> int:
        return (self.distance - 1) // 2

    @cached_property
    def _recovery(self) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal error-space bases ``W0, W1`` (columns) pairing with |0>, |1>."""
        errors = [PauliString(self.n)]
        for w in range(1, self.correctable_weight + 1):
            errors += paulis_of_weight(self.n, w)
        v0 = np.stack([pauli_action(self.codeword_zero, e) for e in errors], axis=1)
        v1 = np.stack([pauli_action(self.codeword_one, e) for e in errors], axis=1)
        c0 = v0.conj().T @ v0
        c1 = v1.conj().T @ v1
        cross = v0.conj().T @ v1
        if not (np.allclose(c0, c1, atol=1e-8) and np.allclose(cross, 0, atol=1e-8)):
            raise RecoveryError(
                f"{self.name}: error set of weight <= {self.correctable_weight} "
                "violates the Knill-Laflamme conditions"
            )
        lam, u = np.linalg.eigh(c0)
        keep = lam > 1e-9 * max(lam.max(), 1.0)
        scale = u[:, keep] / np.sqrt(lam[keep])
        return v0 @ scale, v1 @ scale


Code = Union[StabilizerCode, GenericCode]


def encode(code: Code, alpha: complex, beta: complex) -> DenseState:
    """``alpha |0_L> + beta |1_L>``."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-9:
        raise ValueError("logical amplitudes must be normalized")
    return DenseState(code.n, alpha * code.codeword(0) + beta * code.codeword(1))


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    code_name: str
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    properties: dict[str, object] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        lines = [f"code {self.code_name}: {'valid' if self.valid else 'INVALID'}"]
        lines += [f"  violation: {v}" for v in self.violations]
        lines += [f"  warning: {w}" for w in self.warnings]
        lines += [f"  {k}: {v}" for k, v in self.properties.items()]
        return "\n".join(lines)


def _validate_stabilizer(code: StabilizerCode, rep: ValidationReport) -> None:
    gens = code.generators
    if len(gens) != code.n - 1:
        rep.violations.append(f"expected {code.n - 1} generators for k=1, got {len(gens)}")
    for g in gens:
        if not g.is_hermitian:
            rep.violations.append(f"generator {g} is not Hermitian")
    for a, b in itertools.combinations(gens, 2):
        if not a.commutes(b):
            rep.violations.append(f"generators {a} and {b} anticommute")
    if rank_gf2([vec(g) for g in gens]) < len(gens):
        rep.violations.append("generators are not independent")
    for name, lg in (("logical_x", code.logical_x), ("logical_z", code.logical_z)):
        for g in gens:
            if not lg.commutes(g):
                rep.violations.append(f"{name} {lg} anticommutes with generator {g}")
    if code.logical_x.commutes(code.logical_z):
        rep.violations.append(f"logical_x {code.logical_x} commutes with logical_z {code.logical_z}")
    if rep.violations:
        return
    tz = code.transversal_z_holds
    rep.properties["transversal_z"] = tz
    if code.transversal_z and not tz:
        rep.violations.append("flag transversal_z set but Z^n is not logical Z times a stabilizer")
    rep.properties["css"] = code.is_css
    if code.n <= 10 and not isinstance(code, ConcatenatedCode):
        found = None
        for w in range(1, code.distance + 1):
            for p in paulis_of_weight(code.n, w):
                if code.syndrome(p) == 0 and code.logical_action(p) != (0, 0):
                    found = p
                    break
            if found is not None:
                break
        if found is not None and found.weight < code.distance:
            rep.violations.append(
                f"declared distance {code.distance} but logical {found} has weight {found.weight}"
            )
        elif found is None:
            rep.warnings.append(f"no logical of weight <= {code.distance}; distance exceeds declaration")


def _validate_generic(code: GenericCode, rep: ValidationReport) -> None:
    z0, z1 = code.codeword_zero, code.codeword_one
    for label, v in (("codeword_zero", z0), ("codeword_one", z1)):
        nrm = np.linalg.norm(v)
        if abs(nrm - 1) > 1e-9:
            rep.violations.append(f"{label} has norm {nrm:.12g}")
    ov = np.vdot(z0, z1)
    if abs(ov) > 1e-9:
        rep.violations.append(f"codewords overlap: <0|1> = {ov:.6g}")
    if rep.violations:
        return
    tz = code.transversal_z_holds
    rep.properties["transversal_z"] = tz
    rep.properties["transversal_x"] = code.transversal_x_holds
    if code.transversal_z and not tz:
        rep.violations.append("flag transversal_z set but Z^n does not act as logical Z")
    if code.n <= 12:
        bad = []
        for w in range(1, code.distance):
            for e in paulis_of_weight(code.n, w):
                a = np.vdot(z0, pauli_action(z0, e))
                b = np.vdot(z1, pauli_action(z1, e))
                c = np.vdot(z0, pauli_action(z1, e))
                if abs(a - b) > 1e-9 or abs(c) > 1e-9:
                    bad.append(str(e))
        if bad:
            rep.violations.append(
                f"Knill-Laflamme condition fails for distance {code.distance}: "
                + ", ".join(bad[:5]) + (" ..." if len(bad) > 5 else "")
            )
    else:
        rep.warnings.append("distance not checked above 12 qubits")


def validate(code: Code) -> ValidationReport:
    """Check every structural invariant; violations are reported, not raised."""
    rep = ValidationReport(code.name)
    if isinstance(code, StabilizerCode):
        _validate_stabilizer(code, rep)
    else:
        _validate_generic(code, rep)
    return rep


# ---------------------------------------------------------------------------
# parity property


@dataclass
class ParityReport:
    holds: bool
    zero_support: int
    one_support: int
    witnesses: list[tuple[int, str]]  # (logical bit, offending basis string)


def _bitstring(b: int, n: int) -> str:
    return "".join(str((b >> q) & 1) for q in range(n))


def check_parity_property(code: Code, support: Sequence[int] | None = None) -> ParityReport:
    """Logical 0 on even-weight strings, logical 1 on odd-weight strings.

    With ``support`` only the bits on those qubits count.  Amplitudes below
    1e-10 are ignored; witnesses are printed with qubit 0 leftmost.
    """
    mask = (1 << code.n) - 1 if support is None else sum(1 << q for q in support)
    witnesses = []
    sizes = []
    for bit in (0, 1):
        cw = code.sparse_codeword(bit)
        live = [b for b, a in cw.items() if abs(a) > 1e-10]
        sizes.append(len(live))
        for b in live:
            if (b & mask).bit_count() % 2 != bit:
                witnesses.append((bit, _bitstring(b, code.n)))
    return ParityReport(not witnesses, sizes[0], sizes[1], witnesses)


@dataclass
class SupportResult:
    operator: PauliString
    support: tuple[int, ...]
    parity_holds: bool

    @property
    def weight(self) -> int:
        return len(self.support)


def restricted_parity_support(code: StabilizerCode, max_weight: int | None = None) -> SupportResult | None:
    """Support of a minimum-weight Z-type logical Z, or None if none fits.

    Ties are broken by the lexicographically smallest sorted support.
    """
    if not code.transversal_z_holds:
        raise ValueError(f"{code.name} lacks transversal Z")
    limit = code.n if max_weight is None else max_weight
    for p in code.z_type_logicals():
        if p.weight <= limit:
            rep = check_parity_property(code, p.support)
            return SupportResult(p, p.support, rep.holds)
    return None


# ---------------------------------------------------------------------------
# recovery


@dataclass
class RecoveryBranch:
    probability: float
    state: DenseState | None
    syndrome: int | None = None
    unrecoverable: bool = False


def _block_matrix(amps: np.ndarray, n_total: int, qubits: Sequence[int]) -> tuple[np.ndarray, tuple]:
    lo = qubits[0]
    k = len(qubits)
    if tuple(qubits) != tuple(range(lo, lo + k)):
        raise ValueError("recovery block must be a contiguous qubit range")
    shape = (1 << (n_total - lo - k), 1 << k, 1 << lo)
    m = amps.reshape(shape).transpose(0, 2, 1).reshape(-1, 1 << k)
    return m, shape


def _unblock(m: np.ndarray, shape: tuple) -> np.ndarray:
    hi, dim, lo = shape
    return m.reshape(hi, lo, dim).transpose(0, 2, 1).reshape(-1)


def ideal_recover(code: Code, state: DenseState, qubits: Sequence[int] | None = None) -> list[RecoveryBranch]:
    """Idealized error correction of the block ``qubits`` (default: all).

    Stabilizer codes: every generator is measured (both outcomes kept when
    possible) and the decoder's correction applied.  Generic codes: the
    Knill-Laflamme recovery channel, one branch per Kraus operator, plus an
    ``unrecoverable`` branch for any weight outside the correctable spaces.
    Branch probabilities are relative to the input state.
    """
    if qubits is None:
        qubits = tuple(range(code.n))
    qubits = tuple(qubits)
    if len(qubits) != code.n:
        raise DimensionError(f"block of {len(qubits)} qubits for {code.n}-qubit code")
    N = state.n_qubits
    if isinstance(code, StabilizerCode):
        branches = [(1.0, state, 0)]
        for i, g in enumerate(code.generators):
            full = g.embed(qubits, N)
            nxt = []
            for prob, st, syn in branches:
                for br in measure_pauli(st, full):
                    if br.possible:
                        nxt.append((prob * br.probability, br.post_state, syn | (br.outcome << i)))
            branches = nxt
        out = []
        for prob, st, syn in branches:
            corr = code.decode(syn)
            if not corr.is_identity:
                apply_pauli(st, corr.embed(qubits, N))
            out.append(RecoveryBranch(prob, st, syn))
        return out
    w0, w1 = code._recovery
    m, shape = _block_matrix(state.amplitudes, N, qubits)
    c0 = m @ w0.conj()
    c1 = m @ w1.conj()
    out = []
    captured = np.zeros_like(m)
    for k in range(w0.shape[1]):
        new = np.outer(c0[:, k], code.codeword_zero) + np.outer(c1[:, k], code.codeword_one)
        captured += np.outer(c0[:, k], w0[:, k]) + np.outer(c1[:, k], w1[:, k])
        prob = float(np.vdot(new, new).real)
        if prob >= IMPOSSIBLE:
            out.append(RecoveryBranch(prob, DenseState(N, _unblock(new / np.sqrt(prob), shape)), k))
    rest = m - captured
    prob = float(np.vdot(rest, rest).real)
    if prob >= IMPOSSIBLE:
        out.append(RecoveryBranch(prob, DenseState(N, _unblock(rest / np.sqrt(prob), shape)), None, True))
    if not any(not b.unrecoverable for b in out):
        raise RecoveryError(f"state has no overlap with any correctable space of {code.name}")
    return out


# ---------------------------------------------------------------------------
# registry and files


def _stab(name: str, gens: Sequence[str], lx: str, lz: str, d: int, tz: bool | None = None) -> StabilizerCode:
    return StabilizerCode(
        name=name,
        n=len(lx),
        generators=tuple(PauliString.from_text(g) for g in gens),
        logical_x=PauliString.from_text(lx),
        logical_z=PauliString.from_text(lz),
        distance=d,
        transversal_z=tz,
    )


def steane() -> StabilizerCode:
    return _stab(
        "steane",
        ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"],
        "XXXXXXX", "ZZZZZZZ", 3, True,
    )


def five_qubit() -> StabilizerCode:
    return _stab("five_qubit", ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"], "XXXXX", "ZZZZZ", 3, True)


def repetition(n: int) -> StabilizerCode:
    """Bit-flip repetition code: stabilizers Z_i Z_{i+1}, X_L = X^n, Z_L = Z_0."""
    if n < 1:
        raise ValueError("repetition length must be positive")
    gens = []
    for i in range(n - 1):
        gens.append(PauliString(n, 0, (1 << i) | (1 << (i + 1))))
    return StabilizerCode(
        name=f"rep{n}", n=n, generators=tuple(gens),
        logical_x=_all_x(n), logical_z=PauliString(n, 0, 1), distance=1,
        transversal_z=(n % 2 == 1),
    )


def builtin(name: str) -> StabilizerCode:
    key = name.lower().replace("-", "_")
    if key == "steane":
        return steane()
    if key in ("five_qubit", "5qubit", "perfect5"):
        return five_qubit()
    if key.startswith("rep") and key[3:].isdigit():
        return repetition(int(key[3:]))
    raise KeyError(f"unknown built-in code {name!r}")


def code_to_dict(code: Code) -> dict:
    if isinstance(code, ConcatenatedCode):
        return {
            "schema": CODE_SCHEMA, "kind": "concatenated", "name": code.name,
            "outer": code_to_dict(code.outer), "inner_repetition_length": code.inner_length,
        }
    if isinstance(code, StabilizerCode):
        doc = {
            "schema": CODE_SCHEMA, "kind": "stabilizer", "name": code.name, "n": code.n,
            "distance": code.distance, "generators": [str(g) for g in code.generators],
            "logical_x": str(code.logical_x), "logical_z": str(code.logical_z),
        }
    else:
        def sparse(v):
            return [[int(b), float(v[b].real), float(v[b].imag)] for b in np.flatnonzero(np.abs(v) > 0)]
        doc = {
            "schema": CODE_SCHEMA, "kind": "generic", "name": code.name, "n": code.n,
            "distance": code.distance,
            "codeword_zero": sparse(code.codeword_zero), "codeword_one": sparse(code.codeword_one),
        }
    if code.transversal_z is not None:
        doc["flags"] = {"transversal_z": bool(code.transversal_z)}
    return doc


def code_from_dict(doc: dict) -> Code:
    try:
        kind = doc["kind"]
        if kind == "concatenated":
            outer = code_from_dict(doc["outer"])
            if not isinstance(outer, StabilizerCode):
                raise CodeFormatError("outer code of a concatenation must be a stabilizer code")
            return concatenate(outer, int(doc["inner_repetition_length"]))
        name, n, d = str(doc["name"]), int(doc["n"]), int(doc["distance"])
        tz = doc.get("flags", {}).get("transversal_z")
        if kind == "stabilizer":
            gens = tuple(PauliString.from_text(g) for g in doc["generators"])
            return StabilizerCode(
                name=name, n=n, generators=gens,
                logical_x=PauliString.from_text(doc["logical_x"]),
                logical_z=PauliString.from_text(doc["logical_z"]),
                distance=d, transversal_z=tz,
            )
        if kind == "generic":
            vecs = []
            for key in ("codeword_zero", "codeword_one"):
                v = np.zeros(1 << n, dtype=complex)
                for idx, re, im in doc[key]:
                    if not 0 <= int(idx) < (1 << n):
                        raise CodeFormatError(f"{key}: basis index {idx} out of range for n={n}")
                    v[int(idx)] += complex(re, im)
                vecs.append(v)
            return GenericCode(name, n, vecs[0], vecs[1], d, tz)
        raise CodeFormatError(f"unknown code kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise CodeFormatError(f"malformed code document: {exc}") from exc


def load_code(ref: str | Path, base_dir: Path | None = None) -> Code:
    """Load ``builtin:<name>`` or a JSON code file."""
    s = str(ref)
    if s.startswith("builtin:"):
        return builtin(s.split(":", 1)[1])
    path = Path(s)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CodeFormatError(f"{path}: not valid JSON ({exc})") from exc
    return code_from_dict(doc)


def distance_mismatch_warning(data: Code, ancilla: Code) -> str | None:
    if data.distance != ancilla.distance:
        msg = (
            f"ancilla {ancilla.name} has distance {ancilla.distance}, "
            f"data {data.name} has distance {data.distance}"
        )
        warnings.warn(msg, stacklevel=2)
        return msg
    return None
