"""Gate gadgets built from an ancilla, controlled-Pauli couplings and one measurement.

Three architectures:

* ``fig1``: a single physical ancilla coupled to every data qubit in turn.
* ``fig2``: an encoded ancilla; round ``i`` couples every qubit in the support
  of a Z-type ancilla logical to data qubit ``i``.
* ``fig3``: the ancilla is an outer code concatenated with repetition blocks
  of the data length; one transversal block-to-data coupling per timestep.

Qubit layout: data ``0..n-1``, ancilla block next, then (T gadget, chained
correction) a second ancilla block.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuit import Circuit, Location, LocationKind
from .codes import (
    Code,
    ConcatenatedCode,
    GenericCode,
    StabilizerCode,
    concatenate,
    distance_mismatch_warning,
    repetition,
    restricted_parity_support,
)
from .pauli import CliffordGate, CliffordMap, GateKind, PauliString

__all__ = [
    "GadgetKind",
    "Architecture",
    "TCorrection",
    "GadgetConfig",
    "GadgetError",
    "build",
    "classical_correction_rule",
    "measurement_subgadget",
    "logical_h_map",
    "coupling_sign",
    "verify_logical_cz",
    "target_unitary",
    "conjugate_unitary",
    "algebraic_identities",
]


class GadgetKind(str, enum.Enum):
    S = "S"
    H = "H"
    T = "T"


class Architecture(str, enum.Enum):
    FIG1 = "fig1"
    FIG2 = "fig2"
    FIG3 = "fig3"


class TCorrection(str, enum.Enum):
    CHAIN = "chain_s_gadget"
    RUS = "repeat_until_success"


class GadgetError(ValueError):
    """Unsupported kind/architecture/code combination."""


@dataclass(frozen=True, eq=False)
class GadgetConfig:
    kind: GadgetKind
    architecture: Architecture
    data_code: Code
    ancilla_outer: StabilizerCode | None = None
    reduced_support: bool = False
    interleave_ec: bool = False
    t_correction_mode: TCorrection = TCorrection.CHAIN

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GadgetKind(self.kind))
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        object.__setattr__(self, "t_correction_mode", TCorrection(self.t_correction_mode))

    def describe(self) -> str:
        parts = [f"{self.kind.value}-gadget", self.architecture.value, f"data={self.data_code.name}"]
        if self.ancilla_outer is not None:
            parts.append(f"ancilla={self.ancilla_outer.name}")
        if self.reduced_support:
            parts.append("reduced")
        if self.interleave_ec:
            parts.append("interleaved-EC")
        if self.kind is GadgetKind.T:
            parts.append(self.t_correction_mode.value)
        return " ".join(parts)


# ---------------------------------------------------------------------------
# 2x2 logical algebra

_S = np.diag([1, 1j])
_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_T = np.diag([1, np.exp(1j * np.pi / 4)])
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0 + 0j, -1.0])


def target_unitary(kind: GadgetKind) -> np.ndarray:
    return {GadgetKind.S: _S, GadgetKind.H: _H, GadgetKind.T: _T}[GadgetKind(kind)]


def conjugate_unitary(kind: GadgetKind) -> np.ndarray:
    """The 'wrong-sign' output each gadget produces under a flipped outcome.

    S gadget: S^dag (= Z S); H gadget: Y H; T gadget: T^dag.
    """
    kind = GadgetKind(kind)
    if kind is GadgetKind.S:
        return _S.conj().T
    if kind is GadgetKind.H:
        return _Y @ _H
    return _T.conj().T


def _proportional(a: np.ndarray, b: np.ndarray, tol: float) -> tuple[bool, complex]:
    """Whether ``a = c b`` for a unit-modulus c; returns (ok, c)."""
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    c = a[k] / b[k]
    return bool(abs(abs(c) - 1) <= tol and np.allclose(a, c * b, atol=tol, rtol=0)), complex(c)


def algebraic_identities(tol: float = 1e-12) -> list[tuple[str, bool, str]]:
    """The 2x2 identities behind the gadgets, each as (name, holds, detail)."""
    i2 = np.eye(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    r2 = np.sqrt(2)
    sd = _S.conj().T
    out = []

    def exact(name, a, b):
        out.append((name, bool(np.allclose(a, b, atol=tol, rtol=0)), f"max dev {np.abs(a - b).max():.1e}"))

    def prop(name, a, b):
        ok, c = _proportional(a, b, tol)
        out.append((name, ok, f"phase {np.angle(c) / np.pi:+.4f} pi"))

    exact("(I - iZ)/sqrt2 = e^{-i pi/4} S", (i2 - 1j * _Z) / r2, np.exp(-1j * np.pi / 4) * _S)
    exact("(I + iZ)/sqrt2 = e^{i pi/4} S^dag", (i2 + 1j * _Z) / r2, np.exp(1j * np.pi / 4) * sd)
    exact("Z S^dag = S", _Z @ sd, _S)
    exact("(I - iY)/sqrt2 = X H", (i2 - 1j * _Y) / r2, x @ _H)
    prop("cos(pi/8) I - i sin(pi/8) Z ~ T", np.cos(np.pi / 8) * i2 - 1j * np.sin(np.pi / 8) * _Z, _T)
    v = np.array([np.cos(np.pi / 8), -1j * np.sin(np.pi / 8)])
    fixes = {}
    for name, m in (("S^dag H S", sd @ _H @ _S), ("S H S^dag", _S @ _H @ sd)):
        fixes[name] = bool(np.allclose(m @ v, v, atol=tol, rtol=0))
    winners = [k for k, ok in fixes.items() if ok]
    out.append((
        "|pi/8> is the +1 eigenvector of exactly one of S^dag H S, S H S^dag",
        len(winners) == 1,
        f"fixed by: {', '.join(winners) or 'neither'}",
    ))
    return out


# ---------------------------------------------------------------------------
# code helpers


def coupling_pauli(kind: GadgetKind) -> GateKind:
    return GateKind.CY if GadgetKind(kind) is GadgetKind.H else GateKind.CZ


def coupling_sign(code: Code, kind: GadgetKind) -> int:
    """s with ``P^n = s * P_L`` on the codespace for the coupling Pauli P."""
    if GadgetKind(kind) is GadgetKind.H:
        s = code.transversal_y_sign
        if s is None:
            raise GadgetError(f"{code.name}: Y^n is not a logical Y; H gadget unavailable")
        return s
    if not code.transversal_z_holds:
        raise GadgetError(f"{code.name}: Z^n is not logical Z; gadget needs transversal Z")
    return 1


@lru_cache(maxsize=None)
def _logical_h_map_cached(code: StabilizerCode) -> CliffordMap:
    n = code.n
    gens = list(code.generators)
    destab = list(code.destabilizers)
    lx, lz = code.logical_x, code.logical_z

    def image(p: PauliString) -> PauliString:
        src = PauliString(n)
        dst = PauliString(n)
        for g, d in zip(gens, destab):
            if not p.commutes(d):
                src, dst = src * g, dst * g
            if not p.commutes(g):
                src, dst = src * d, dst * d
        if not p.commutes(lz):
            src, dst = src * lx, dst * lz
        if not p.commutes(lx):
            src, dst = src * lz, dst * lx
        assert (src.x, src.z) == (p.x, p.z)
        return dst.with_phase(dst.phase_exp + p.phase_exp - src.phase_exp)

    xs = [image(PauliString(n, 1 << q, 0)) for q in range(n)]
    zs = [image(PauliString(n, 0, 1 << q)) for q in range(n)]
    return CliffordMap(xs, zs)


def logical_h_map(code: StabilizerCode) -> CliffordMap:
    """Clifford fixing every generator and destabilizer while swapping X_L and Z_L.

    It acts as logical Hadamard (up to global phase) on the codespace.  No
    physical circuit is implied; the map is an idealized block operation.
    """
    return _logical_h_map_cached(code)


def _support(code: StabilizerCode, reduced: bool) -> tuple[int, ...]:
    if not reduced:
        return tuple(range(code.n))
    res = restricted_parity_support(code)
    if res is None or not res.parity_holds:
        raise GadgetError(f"{code.name}: no Z-type logical with the restricted parity property")
    return res.support


# ---------------------------------------------------------------------------
# builder


class _Builder:
    def __init__(self, width: int):
        self.width = width
        self.locs: list[Location] = []
        self.t = 0
        self.alive: set[int] = set()
        self.n_records = 0

    def record(self) -> int:
        self.n_records += 1
        return self.n_records - 1

    def step(self, ops: Sequence[dict], kill: Sequence[int] = ()) -> None:
        touched: set[int] = set()
        for op in ops:
            loc = Location(id=len(self.locs), timestep=self.t, **op)
            self.locs.append(loc)
            touched.update(loc.qubits)
            if loc.kind == LocationKind.PREPARE:
                self.alive.update(loc.qubits)
        for q in sorted(self.alive - touched):
            self.locs.append(Location(id=len(self.locs), timestep=self.t, kind=LocationKind.IDLE, qubits=(q,)))
        self.alive.difference_update(kill)
        self.t += 1


def _gate(kind: GateKind, qubits: Sequence[int], cond=()) -> dict:
    qs = tuple(qubits)
    return dict(kind=LocationKind.GATE, qubits=qs, gate=CliffordGate(kind, qs), condition=tuple(cond))


@dataclass
class _Block:
    """One ancilla block of a gadget and how to drive it."""

    qubits: tuple[int, ...]
    code_key: str | None  # None: single physical qubit


def _phase_gadget(
    b: _Builder,
    cfg: GadgetConfig,
    block: _Block,
    data: Sequence[int],
    ckind: GateKind,
    label: str,
    codes: dict[str, Code],
    meta: dict,
    cond: tuple = (),
) -> int:
    """Prepare, couple, Hadamard and measure one ancilla block; returns the record id."""
    arch = cfg.architecture
    n = len(data)
    prep = dict(kind=LocationKind.PREPARE, qubits=block.qubits, label=label, code=block.code_key, condition=cond)
    b.step([prep])
    rounds: list[list[tuple[int, int]]] = []
    marks: list[int] = []
    if arch is Architecture.FIG1:
        a = block.qubits[0]
        for d in data:
            rounds.append([(a, d)])
            b.step([_gate(ckind, (a, d), cond)])
            marks.append(len(b.locs))
    elif arch is Architecture.FIG2:
        # round i hooks the ancilla support to data qubit i, one gate per timestep
        for d in data:
            r = [(block.qubits[s], d) for s in meta["support"]]
            rounds.append(r)
            for pair in r:
                b.step([_gate(ckind, pair, cond)])
            marks.append(len(b.locs))
    else:
        for j in meta["support"]:
            r = [(block.qubits[j * n + i], data[i]) for i in range(n)]
            rounds.append(r)
            b.step([_gate(ckind, pair, cond) for pair in r])
            if cfg.interleave_ec:
                b.step([dict(kind=LocationKind.EC, qubits=tuple(data), code="data", condition=cond)])
            marks.append(len(b.locs))
    meta.setdefault("rounds", []).append([[list(p) for p in r] for r in rounds])
    meta.setdefault("round_marks", []).append(marks)

    # ancilla logical Hadamard
    if arch is Architecture.FIG1:
        b.step([_gate(GateKind.H, (block.qubits[0],), cond)])
    elif arch is Architecture.FIG2:
        code = codes[block.code_key]
        if code.transversal_h_is_logical:
            b.step([_gate(GateKind.H, (q,), cond) for q in block.qubits])
            meta["logical_h"] = "transversal"
        else:
            b.step([dict(kind=LocationKind.BLOCK_CLIFFORD, qubits=block.qubits, label="logical_h",
                         code=block.code_key, clifford=logical_h_map(code), condition=cond)])
            meta["logical_h"] = "idealized"
    else:
        code: ConcatenatedCode = codes[block.code_key]
        if code.outer.transversal_h_is_logical:
            inner = repetition(code.inner_length)
            codes.setdefault("inner", inner)
            hmap = logical_h_map(inner)
            b.step([
                dict(kind=LocationKind.BLOCK_CLIFFORD, qubits=tuple(block.qubits[q] for q in code.block(j)),
                     label="block_h", code="inner", clifford=hmap, condition=cond)
                for j in range(code.m)
            ])
            meta["logical_h"] = "per_block"
        else:
            b.step([dict(kind=LocationKind.BLOCK_CLIFFORD, qubits=block.qubits, label="logical_h",
                         code=block.code_key, clifford=logical_h_map(code), condition=cond)])
            meta["logical_h"] = "idealized"

    rec = b.record()
    if arch is Architecture.FIG1:
        m = dict(kind=LocationKind.MEASURE_Z, qubits=block.qubits, record=rec, condition=cond)
    else:
        m = dict(kind=LocationKind.MEASURE_LOGICAL, qubits=block.qubits, code=block.code_key,
                 record=rec, condition=cond)
    b.step([m], kill=block.qubits)
    return rec


def classical_correction_rule(kind: GadgetKind, outcome: int, sign: int = 1) -> str | None:
    """Logical correction for a gadget outcome.

    Returns ``"X"``/``"Z"`` (a transversal logical Pauli), ``"S_GADGET"`` for
    the T gadget's chained correction, or None.  ``sign`` is s in
    ``Y^n = s Y_L`` and only matters for the H gadget: outcome 0 leaves
    ``(I - i s Y_L)/sqrt2``, which is ``X_L H_L`` for s = +1 and ``Z_L H_L``
    for s = -1.
    """
    kind = GadgetKind(kind)
    if kind is GadgetKind.S:
        return "Z" if outcome else None
    if kind is GadgetKind.T:
        return "S_GADGET" if outcome else None
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    first, second = ("X", "Z") if sign == 1 else ("Z", "X")
    return second if outcome else first


def _data_logical(code: Code, letter: str, data: Sequence[int], width: int) -> PauliString:
    p = code.logical_x if letter == "X" else code.logical_z
    return p.embed(tuple(data), width)


def _corrections(b: _Builder, kind: GadgetKind, rec: int, sign: int, code: Code,
                 data: Sequence[int], cond: tuple = ()) -> None:
    ops = []
    for outcome in (0, 1):
        letter = classical_correction_rule(kind, outcome, sign)
        if letter in ("X", "Z"):
            ops.append(dict(kind=LocationKind.CLASSICAL_PAULI, qubits=tuple(data), label=f"{letter}_L",
                            pauli=_data_logical(code, letter, data, b.width),
                            condition=cond + ((rec, outcome),)))
    if ops:
        b.step(ops)


def _ancilla_layout(cfg: GadgetConfig) -> tuple[int, Code | None]:
    n = cfg.data_code.n
    if cfg.architecture is Architecture.FIG1:
        return 1, None
    if cfg.ancilla_outer is None:
        raise GadgetError(f"{cfg.architecture.value} needs an ancilla code")
    if not isinstance(cfg.ancilla_outer, StabilizerCode):
        raise GadgetError("ancilla code must be a stabilizer code")
    if cfg.architecture is Architecture.FIG2:
        return cfg.ancilla_outer.n, cfg.ancilla_outer
    anc = concatenate(cfg.ancilla_outer, n)
    return anc.n, anc


def build(cfg: GadgetConfig) -> Circuit:
    data_code = cfg.data_code
    n = data_code.n
    if cfg.interleave_ec and cfg.architecture is not Architecture.FIG3:
        raise GadgetError("interleaved EC is a fig3 option")
    sign = coupling_sign(data_code, cfg.kind)
    ckind = coupling_pauli(cfg.kind)
    m, anc_code = _ancilla_layout(cfg)
    n_blocks = 2 if (cfg.kind is GadgetKind.T and cfg.t_correction_mode is TCorrection.CHAIN) else 1
    width = n + n_blocks * m
    codes: dict[str, Code] = {"data": data_code}
    meta: dict = {
        "kind": cfg.kind.value,
        "architecture": cfg.architecture.value,
        "coupling": ckind.value,
        "coupling_sign": sign,
        "data_code": data_code.name,
        "warnings": [],
        "non_ft_elements": [],
    }
    if anc_code is not None:
        codes["ancilla"] = anc_code
        meta["ancilla_code"] = anc_code.name
        outer = cfg.ancilla_outer
        if outer.transversal_z_holds is False:
            raise GadgetError(f"ancilla {outer.name} lacks transversal Z")
        meta["support"] = list(_support(outer, cfg.reduced_support))
        msg = distance_mismatch_warning(data_code, outer)
        if msg:
            meta["warnings"].append(msg)
    data = tuple(range(n))
    blocks = [_Block(tuple(range(n + k * m, n + (k + 1) * m)), None if anc_code is None else "ancilla")
              for k in range(n_blocks)]
    meta["ancilla_blocks"] = [list(bl.qubits) for bl in blocks]
    b = _Builder(width)
    b.alive.update(data)
    label = "pi_8" if cfg.kind is GadgetKind.T else "minus_i"
    rec = _phase_gadget(b, cfg, blocks[0], data, ckind, label, codes, meta)
    records = [rec]
    postselect: tuple = ()
    if cfg.kind is GadgetKind.T:
        if cfg.t_correction_mode is TCorrection.CHAIN:
            cond = ((rec, 1),)
            rec2 = _phase_gadget(b, cfg, blocks[1], data, GateKind.CZ, "minus_i", codes, meta, cond)
            records.append(rec2)
            _corrections(b, GadgetKind.S, rec2, 1, data_code, data, cond)
        else:
            postselect = ((rec, 0),)
    else:
        _corrections(b, cfg.kind, rec, sign, data_code, data)
    meta["records"] = records
    if meta.get("logical_h") == "idealized":
        meta["non_ft_elements"].append("idealized ancilla logical H block")
    if cfg.interleave_ec and isinstance(data_code, GenericCode):
        meta["non_ft_elements"].append("interleaved EC on a generic code is idealized")
    circ = Circuit(width, b.locs, data, codes, postselect, meta)
    circ.check()
    return circ


def measurement_subgadget(code: Code, qubits: Sequence[int], record: int = 0, width: int | None = None) -> Circuit:
    """Idealized ancilla readout: full syndrome extraction, correction, logical Z measurement."""
    if not isinstance(code, StabilizerCode):
        raise GadgetError("measurement sub-gadget needs a stabilizer ancilla code")
    qs = tuple(qubits)
    if len(qs) != code.n:
        raise GadgetError("block size does not match the code")
    w = width if width is not None else max(qs) + 1
    loc = Location(id=0, timestep=0, kind=LocationKind.MEASURE_LOGICAL, qubits=qs, code="ancilla", record=record)
    c = Circuit(w, [loc], (), {"ancilla": code})
    c.check()
    return c


# ---------------------------------------------------------------------------
# logical CZ sub-gadget check


def coupling_circuit(cfg: GadgetConfig, rounds: int | None = None) -> Circuit:
    """Prefix of the gadget: ancilla preparation and the first ``rounds`` coupling rounds."""
    full = build(GadgetConfig(
        cfg.kind, cfg.architecture, cfg.data_code, cfg.ancilla_outer, cfg.reduced_support, False,
        cfg.t_correction_mode,
    ))
    marks = full.meta["round_marks"][0]
    end = marks[-1] if rounds is None else marks[rounds - 1]
    return full.with_locations(full.locations[:end])


def verify_logical_cz(cfg: GadgetConfig, n_random: int = 8, seed: int = 7, tol: float = 1e-9) -> bool:
    """Check that the coupling rounds act as a logical controlled-Z between the blocks.

    With the ancilla in logical ``|-i>`` the result must be
    ``(|0_A>|psi> - i |1_A> Z_L|psi>)/sqrt2``.  For fig3 the state after the
    first round is also compared with ``|v0>|psi> - i |v1> Z_L|psi>``, where
    ``v0``/``v1`` keep the ancilla components whose first hooked block reads
    all zeros / all ones.
    """
    from .verifier import logical_inputs, run_circuit_statevector

    cfg = GadgetConfig(GadgetKind.S, cfg.architecture, cfg.data_code, cfg.ancilla_outer,
                       cfg.reduced_support, False)
    if cfg.architecture is Architecture.FIG1:
        raise GadgetError("logical CZ check applies to encoded ancillas (fig2/fig3)")
    circ = coupling_circuit(cfg)
    data_code = cfg.data_code
    anc: StabilizerCode = circ.codes["ancilla"]
    a0, a1 = anc.codeword(0), anc.codeword(1)
    minus_i = (a0 - 1j * a1) / np.sqrt(2)
    zl = _data_logical(data_code, "Z", range(data_code.n), data_code.n)
    checks = [(circ, lambda psi: (np.kron(a0, psi) - 1j * np.kron(a1, _apply(zl, psi))) / np.sqrt(2))]
    if cfg.architecture is Architecture.FIG3:
        j = circ.meta["support"][0]
        n = data_code.n
        block_bits = sum(1 << q for q in anc.block(j))
        idx = np.arange(1 << anc.n)
        v0 = np.where((idx & block_bits) == 0, minus_i, 0)
        v1 = 1j * np.where((idx & block_bits) == block_bits, minus_i, 0)
        first = coupling_circuit(cfg, rounds=1)
        checks.append((first, lambda psi: np.kron(v0, psi) - 1j * np.kron(v1, _apply(zl, psi))))
    for _, (alpha, beta) in logical_inputs(n_random, seed):
        psi = alpha * data_code.codeword(0) + beta * data_code.codeword(1)
        for c, expect in checks:
            leaves = run_circuit_statevector(c, psi)
            want = expect(psi)
            for leaf in leaves:
                f = abs(np.vdot(want, leaf.amplitudes)) ** 2 / (np.vdot(want, want).real * leaf.norm2)
                if f < 1 - tol:
                    return False
    return True


def _apply(p: PauliString, v: np.ndarray) -> np.ndarray:
    from .statevector import pauli_action

    return pauli_action(v, p)
