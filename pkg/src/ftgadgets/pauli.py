"""Pauli-group arithmetic and Clifford conjugation.

Pauli strings are stored as two integer bitmasks (bit ``q`` of ``x``/``z`` is
qubit ``q``) plus a power of ``i``.  The phase uses the *Y convention*: the
operator is ``i**phase_exp`` times the tensor product of the single-qubit
letters, where a qubit with both bits set carries the letter ``Y`` (not
``XZ``).  Text form puts qubit 0 leftmost, e.g. ``"-iZZZIIII"``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "DimensionError",
    "PauliString",
    "GateKind",
    "CliffordGate",
    "CliffordMap",
    "pauli_mul",
    "weight",
    "commutes",
    "conjugate",
    "paulis_of_weight",
]

_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    x: int = 0
    z: int = 0
    phase_exp: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bitmask wider than n_qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # ---- construction -------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def from_text(cls, text: str) -> PauliString:
        """Parse ``"[+|-|+i|-i]PPP..."`` with ``P`` in ``IXYZ``."""
        s = text.strip()
        body_start = len(s) - len(s.lstrip("+-i"))
        prefix, body = s[:body_start], s[body_start:]
        if prefix not in _PREFIX_PHASE:
            raise ValueError(f"bad phase prefix {prefix!r} in {text!r}")
        if not body:
            raise ValueError("empty Pauli string")
        x = z = 0
        for q, ch in enumerate(body.upper()):
            if ch == "X":
                x |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
            elif ch != "I":
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
        return cls(len(body), x, z, _PREFIX_PHASE[prefix])

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        chars = ["I"] * n
        chars[qubit] = letter
        return cls.from_text("".join(chars))

    @classmethod
    def from_bits(
        cls, x_bits: Sequence[int], z_bits: Sequence[int], phase_exp: int = 0
    ) -> PauliString:
        if len(x_bits) != len(z_bits):
            raise DimensionError("x_bits and z_bits differ in length")
        x = sum(1 << q for q, b in enumerate(x_bits) if b)
        z = sum(1 << q for q, b in enumerate(z_bits) if b)
        return cls(len(x_bits), x, z, phase_exp)

    # ---- views --------------------------------------------------------
    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> q) & 1 for q in range(self.n_qubits))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> q) & 1 for q in range(self.n_qubits))

    @property
    def letters(self) -> str:
        out = []
        for q in range(self.n_qubits):
            bx, bz = (self.x >> q) & 1, (self.z >> q) & 1
            out.append("IXZY"[bx | (bz << 1)])
        return "".join(out)

    def __str__(self) -> str:
        prefix = _PHASE_PREFIX[self.phase_exp]
        return ("" if prefix == "+" else prefix) + self.letters

    def __repr__(self) -> str:
        return f"PauliString({_PHASE_PREFIX[self.phase_exp]}{self.letters})"

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(q for q in range(self.n_qubits) if (mask >> q) & 1)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def xz_phase(self) -> int:
        """Phase exponent when the operator is written as ``i^e X^x Z^z``."""
        return (self.phase_exp + _popcount(self.x & self.z)) % 4

    # ---- algebra ------------------------------------------------------
    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_mul(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, self.phase_exp + 2)

    def with_phase(self, phase_exp: int) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, phase_exp)

    def unsigned(self) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, 0)

    def commutes(self, other: PauliString) -> bool:
        return commutes(self, other)

    def restrict(self, qubits: Sequence[int]) -> PauliString:
        """Letters on ``qubits`` (in that order) as a smaller string; phase dropped."""
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << j
            z |= ((self.z >> q) & 1) << j
        return PauliString(len(qubits), x, z)

    def embed(self, qubits: Sequence[int], n: int) -> PauliString:
        """Place this string onto ``qubits`` of an ``n``-qubit register."""
        if len(qubits) != self.n_qubits:
            raise DimensionError("qubit list does not match string length")
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> j) & 1) << q
            z |= ((self.z >> j) & 1) << q
        return PauliString(n, x, z, self.phase_exp)

    def tensor(self, other: PauliString) -> PauliString:
        """``self`` on the low qubits, ``other`` on the following ones."""
        n = self.n_qubits
        return PauliString(
            n + other.n_qubits,
            self.x | (other.x << n),
            self.z | (other.z << n),
            self.phase_exp + other.phase_exp,
        )

    def sort_key(self) -> tuple[int, str]:
        return (self.weight, self.letters)


def _check_dims(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"{a.n_qubits}-qubit and {b.n_qubits}-qubit Pauli strings")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    _check_dims(a, b)
    # In X^x Z^z form: Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}.
    e = a.xz_phase + b.xz_phase + 2 * _popcount(a.z & b.x)
    x, z = a.x ^ b.x, a.z ^ b.z
    return PauliString(a.n_qubits, x, z, e - _popcount(x & z))


def weight(p: PauliString) -> int:
    return p.weight


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_dims(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def paulis_of_weight(n: int, w: int) -> list[PauliString]:
    """All unsigned ``n``-qubit Paulis of weight ``w``, sorted by text."""
    out = []
    for qubits in itertools.combinations(range(n), w):
        for letters in itertools.product("XYZ", repeat=w):
            x = z = 0
            for q, ch in zip(qubits, letters):
                if ch in "XY":
                    x |= 1 << q
                if ch in "ZY":
                    z |= 1 << q
            out.append(PauliString(n, x, z))
    out.sort(key=lambda p: p.letters)
    return out


class GateKind(str, enum.Enum):
    H = "H"
    S = "S"
    S_DAG = "S_DAG"
    X = "X"
    Y = "Y"
    Z = "Z"
    CX = "CX"
    CY = "CY"
    CZ = "CZ"

    @property
    def arity(self) -> int:
        return 2 if self in (GateKind.CX, GateKind.CY, GateKind.CZ) else 1


# Images of (X_q, Z_q) for each local qubit q, as local Pauli text.
_GATE_IMAGES: dict[GateKind, tuple[tuple[str, str], ...]] = {
    GateKind.H: (("Z", "X"),),
    GateKind.S: (("Y", "Z"),),
    GateKind.S_DAG: (("-Y", "Z"),),
    GateKind.X: (("X", "-Z"),),
    GateKind.Y: (("-X", "-Z"),),
    GateKind.Z: (("-X", "Z"),),
    GateKind.CX: (("XX", "ZI"), ("IX", "ZZ")),
    GateKind.CY: (("XY", "ZI"), ("ZX", "ZZ")),
    GateKind.CZ: (("XZ", "ZI"), ("ZX", "IZ")),
}


@dataclass(frozen=True)
class CliffordGate:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != kind.arity:
            raise ValueError(f"{kind.value} acts on {kind.arity} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind.value} needs distinct qubits, got {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError("negative qubit index")

    def __str__(self) -> str:
        return f"{self.kind.value}({','.join(map(str, self.qubits))})"


class CliffordMap:
    """A Clifford unitary on a few qubits, given by the images of X_q and Z_q.

    Conjugation results for each local Pauli pattern are memoised, so a map
    applied to thousands of rows costs one dictionary lookup per row after
    warm-up.
    """

    def __init__(self, x_images: Sequence[PauliString], z_images: Sequence[PauliString]):
        k = len(x_images)
        if len(z_images) != k or any(p.n_qubits != k for p in (*x_images, *z_images)):
            raise DimensionError("Clifford images must be k strings on k qubits")
        self.k = k
        self.x_images = tuple(x_images)
        self.z_images = tuple(z_images)
        self._cache: dict[tuple[int, int], PauliString] = {}

    @classmethod
    def from_text(cls, x_images: Iterable[str], z_images: Iterable[str]) -> CliffordMap:
        return cls(
            [PauliString.from_text(t) for t in x_images],
            [PauliString.from_text(t) for t in z_images],
        )

    def image_xz(self, x: int, z: int) -> PauliString:
        """Image of the local operator ``X^x Z^z`` (xz-form, no phase)."""
        key = (x, z)
        hit = self._cache.get(key)
        if hit is None:
            hit = PauliString(self.k)
            for j in range(self.k):
                if (x >> j) & 1:
                    hit = pauli_mul(hit, self.x_images[j])
            for j in range(self.k):
                if (z >> j) & 1:
                    hit = pauli_mul(hit, self.z_images[j])
            self._cache[key] = hit
        return hit

    def apply(self, p: PauliString, qubits: Sequence[int]) -> PauliString:
        """Return ``U p U^dag`` where ``U`` acts on ``qubits`` of ``p``."""
        if len(qubits) != self.k:
            raise DimensionError("qubit list does not match map size")
        n = p.n_qubits
        x_loc = z_loc = 0
        gate_mask = 0
        for j, q in enumerate(qubits):
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for {n}-qubit string")
            gate_mask |= 1 << q
            x_loc |= ((p.x >> q) & 1) << j
            z_loc |= ((p.z >> q) & 1) << j
        img = self.image_xz(x_loc, z_loc)
        x = p.x & ~gate_mask
        z = p.z & ~gate_mask
        for j, q in enumerate(qubits):
            x |= ((img.x >> j) & 1) << q
            z |= ((img.z >> j) & 1) << q
        # X^{x_out} (i^eL X^{Lx} Z^{Lz}) Z^{z_out} has xz phase e + eL.
        e = p.xz_phase + img.xz_phase
        return PauliString(n, x, z, e - _popcount(x & z))


@lru_cache(maxsize=None)
def gate_map(kind: GateKind) -> CliffordMap:
    pairs = _GATE_IMAGES[GateKind(kind)]
    return CliffordMap.from_text([p[0] for p in pairs], [p[1] for p in pairs])


def conjugate(g: CliffordGate, p: PauliString) -> PauliString:
    """Return ``g p g^dag`` with exact phase."""
    for q in g.qubits:
        if q >= p.n_qubits:
            raise IndexError(f"gate qubit {q} out of range for {p.n_qubits}-qubit string")
    return gate_map(g.kind).apply(p, g.qubits)
