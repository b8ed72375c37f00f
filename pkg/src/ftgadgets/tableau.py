"""Stabilizer tableau simulation and Pauli-frame propagation.

Rows are ``PauliString`` values whose x/z parts are Python ints, i.e.
arbitrary-length packed bit words; a 56-qubit row is one small integer pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .circuit import Circuit, Location, LocationKind
from .codes import StabilizerCode
from .pauli import CliffordGate, CliffordMap, PauliString, conjugate, gate_map
from .symplectic import complete_destabilizers, rank_gf2, vec

__all__ = [
    "Tableau",
    "PauliFrame",
    "MeasurementContradiction",
    "BackendUnsupported",
    "propagate_frame",
    "run_tableau",
    "TableauLeaf",
]


class MeasurementContradiction(RuntimeError):
    """A deterministic outcome was forced to the opposite value."""


class BackendUnsupported(RuntimeError):
    """Non-Clifford operation handed to the tableau backend."""


@dataclass
class Tableau:
    n_qubits: int
    stabilizers: list[PauliString]
    destabilizers: list[PauliString]

    @classmethod
    def zero_state(cls, n: int) -> Tableau:
        return cls(
            n,
            [PauliString(n, 0, 1 << q) for q in range(n)],
            [PauliString(n, 1 << q, 0) for q in range(n)],
        )

    @classmethod
    def from_stabilizers(cls, stabilizers: Sequence[PauliString]) -> Tableau:
        stabs = list(stabilizers)
        n = stabs[0].n_qubits
        if len(stabs) != n:
            raise ValueError(f"need {n} stabilizers for a {n}-qubit state, got {len(stabs)}")
        return cls(n, stabs, complete_destabilizers(stabs))

    def copy(self) -> Tableau:
        return Tableau(self.n_qubits, list(self.stabilizers), list(self.destabilizers))

    # ---- unitary updates ---------------------------------------------
    def apply_gate(self, g: CliffordGate) -> Tableau:
        m = gate_map(g.kind)
        self.stabilizers = [m.apply(r, g.qubits) for r in self.stabilizers]
        self.destabilizers = [m.apply(r, g.qubits) for r in self.destabilizers]
        return self

    def apply_map(self, cmap: CliffordMap, qubits: Sequence[int]) -> Tableau:
        self.stabilizers = [cmap.apply(r, qubits) for r in self.stabilizers]
        self.destabilizers = [cmap.apply(r, qubits) for r in self.destabilizers]
        return self

    def apply_pauli(self, p: PauliString) -> Tableau:
        # P r P = r if they commute, -r otherwise
        self.stabilizers = [r if r.commutes(p) else -r for r in self.stabilizers]
        return self

    # ---- measurement -------------------------------------------------
    def _decompose(self, p: PauliString) -> PauliString:
        """Product of the stabilizers equal to ``+-p`` (``p`` must commute with all)."""
        prod = PauliString(self.n_qubits)
        for s, d in zip(self.stabilizers, self.destabilizers):
            if not p.commutes(d):
                prod = prod * s
        return prod

    def expectation(self, p: PauliString) -> int:
        """+1 / -1 for a deterministic observable, 0 for a random one."""
        if any(not p.commutes(s) for s in self.stabilizers):
            return 0
        prod = self._decompose(p)
        if (prod.x, prod.z) != (p.x, p.z):
            raise ValueError("stabilizer rows are not a complete set")
        rel = (p.phase_exp - prod.phase_exp) % 4
        if rel not in (0, 2):
            raise ValueError(f"{p} is not Hermitian")
        return 1 if rel == 0 else -1

    def measure(self, p: PauliString, forced_outcome: int | None = None) -> tuple[str, int]:
        """Measure Hermitian ``p``; returns ("deterministic"|"random", outcome bit)."""
        if not p.is_hermitian:
            raise ValueError(f"{p} is not Hermitian")
        hit = next((i for i, s in enumerate(self.stabilizers) if not p.commutes(s)), None)
        if hit is None:
            outcome = 0 if self.expectation(p) == 1 else 1
            if forced_outcome is not None and forced_outcome != outcome:
                raise MeasurementContradiction(f"{p} is deterministically {outcome}")
            return "deterministic", outcome
        pivot = self.stabilizers[hit]
        for i, s in enumerate(self.stabilizers):
            if i != hit and not p.commutes(s):
                self.stabilizers[i] = s * pivot
        for i, d in enumerate(self.destabilizers):
            if i != hit and not p.commutes(d):
                self.destabilizers[i] = d * pivot
        outcome = 0 if forced_outcome is None else forced_outcome
        self.destabilizers[hit] = pivot
        self.stabilizers[hit] = -p if outcome else p
        return "random", outcome

    def measure_z(self, qubit: int, forced_outcome: int | None = None) -> tuple[str, int]:
        return self.measure(PauliString(self.n_qubits, 0, 1 << qubit), forced_outcome)

    def prepare_block(self, qubits: Sequence[int], stabilizers: Sequence[PauliString]) -> Tableau:
        """Replace fresh ``|0>`` qubits ``qubits`` by the state with the given local stabilizers."""
        n = self.n_qubits
        zs = [PauliString(n, 0, 1 << q) for q in qubits]
        for zq in zs:
            if self.expectation(zq) != 1:
                raise ValueError(f"qubit {zq.support[0]} is not a fresh |0>")
        mask = sum(1 << q for q in qubits)
        rest: list[PauliString] = []
        for s in self.stabilizers:
            # each Z_q is itself a +1 stabilizer, so stripping it keeps the sign right
            for zq in zs:
                if s.z & zq.z:
                    s = s * zq
            if s.x & mask:
                raise ValueError("block qubits are entangled with the rest")
            if not s.is_identity and rank_gf2([vec(r) for r in rest] + [vec(s)]) > len(rest):
                rest.append(s)
        rows = rest + [s.embed(qubits, n) for s in stabilizers]
        if len(rows) != n:
            raise ValueError(f"block needs {len(qubits)} independent stabilizers")
        self.stabilizers = rows
        self.destabilizers = complete_destabilizers(rows)
        return self


# ---------------------------------------------------------------------------
# branch-enumerating ideal run


@dataclass
class TableauLeaf:
    records: dict[int, int]
    probability: float
    tableau: Tableau


def _condition_holds(loc: Location, records: dict[int, int]) -> bool:
    return all(records.get(r) == v for r, v in loc.condition)


def _clifford_check(loc: Location) -> None:
    if not loc.is_clifford or (loc.kind == LocationKind.PREPARE and loc.label == "pi_8"):
        raise BackendUnsupported(
            f"location {loc.id} is not Clifford; use the statevector backend"
        )


def run_tableau(circuit: Circuit, initial: Tableau) -> list[TableauLeaf]:
    """Run ``circuit`` ideally, enumerating every random measurement outcome."""
    leaves = [TableauLeaf({}, 1.0, initial.copy())]
    for loc in circuit.locations:
        _clifford_check(loc)
        nxt: list[TableauLeaf] = []
        for leaf in leaves:
            if not _condition_holds(loc, leaf.records):
                nxt.append(leaf)
                continue
            nxt.extend(_tableau_step(circuit, loc, leaf))
        leaves = [l for l in nxt if all(l.records.get(r, v) == v for r, v in circuit.postselect)]
    return leaves


def _measure_branches(leaf: TableauLeaf, p: PauliString, record: int | None, flip: bool = False):
    t = leaf.tableau
    if t.expectation(p) != 0:
        _, out = t.measure(p)
        recs = dict(leaf.records)
        if record is not None:
            recs[record] = out ^ flip
        return [TableauLeaf(recs, leaf.probability, t)]
    out = []
    for bit in (0, 1):
        tb = t.copy()
        tb.measure(p, bit)
        recs = dict(leaf.records)
        if record is not None:
            recs[record] = bit ^ flip
        out.append(TableauLeaf(recs, leaf.probability / 2, tb))
    return out


def _tableau_step(circuit: Circuit, loc: Location, leaf: TableauLeaf) -> list[TableauLeaf]:
    t = leaf.tableau
    n = circuit.width
    kind = loc.kind
    if kind == LocationKind.IDLE:
        return [leaf]
    if kind == LocationKind.GATE:
        t.apply_gate(loc.gate)
        return [leaf]
    if kind == LocationKind.BLOCK_CLIFFORD:
        t.apply_map(loc.clifford, loc.qubits)
        return [leaf]
    if kind == LocationKind.CLASSICAL_PAULI:
        t.apply_pauli(loc.pauli)
        return [leaf]
    if kind == LocationKind.PREPARE:
        if loc.code is None:
            p = PauliString(1, 0, 1)
            if loc.label == "minus_i":
                p = PauliString.from_text("-Y")
            t.prepare_block(loc.qubits, [p])
        else:
            code = circuit.codes[loc.code]
            label = {"zero": "zero", "minus_i": "minus_i"}[loc.label]
            t.prepare_block(loc.qubits, code.state_stabilizers(label))
        return [leaf]
    if kind == LocationKind.MEASURE_Z:
        return _measure_branches(leaf, PauliString(n, 0, 1 << loc.qubits[0]), loc.record, loc.flip)
    if kind in (LocationKind.EC, LocationKind.MEASURE_LOGICAL):
        code = circuit.codes[loc.code]
        leaves = [leaf]
        for g in code.generators:
            full = g.embed(loc.qubits, n)
            leaves = [b for l in leaves for b in _measure_branches(l, full, None)]
        out = []
        for l in leaves:
            syn = 0
            for i, g in enumerate(code.generators):
                if l.tableau.expectation(g.embed(loc.qubits, n)) == -1:
                    syn |= 1 << i
            corr = code.decode(syn)
            if not corr.is_identity:
                l.tableau.apply_pauli(corr.embed(loc.qubits, n))
            if kind == LocationKind.MEASURE_LOGICAL:
                out.extend(_measure_branches(l, code.logical_z.embed(loc.qubits, n), loc.record))
            else:
                out.append(l)
        return out
    raise ValueError(f"unknown location kind {kind!r}")


# ---------------------------------------------------------------------------
# Pauli frames


@dataclass
class PauliFrame:
    frame: PauliString
    classical_flips: set[int] = field(default_factory=set)

    def data_part(self, qubits: Sequence[int]) -> PauliString:
        return self.frame.restrict(qubits)


def _clear(p: PauliString, qubits: Sequence[int]) -> PauliString:
    mask = sum(1 << q for q in qubits)
    return PauliString(p.n_qubits, p.x & ~mask, p.z & ~mask)


def frame_step(circuit: Circuit, loc: Location, f: PauliFrame) -> None:
    """Advance ``f`` through one location (in place). Signs are dropped."""
    kind = loc.kind
    if kind == LocationKind.IDLE:
        return
    _clifford_check(loc)
    if loc.condition and kind != LocationKind.CLASSICAL_PAULI:
        raise BackendUnsupported(f"location {loc.id}: conditional quantum operations need the statevector backend")
    if kind == LocationKind.GATE:
        f.frame = conjugate(loc.gate, f.frame).unsigned()
    elif kind == LocationKind.BLOCK_CLIFFORD:
        f.frame = loc.clifford.apply(f.frame, loc.qubits).unsigned()
    elif kind == LocationKind.PREPARE:
        f.frame = _clear(f.frame, loc.qubits)
    elif kind == LocationKind.MEASURE_Z:
        q = loc.qubits[0]
        flipped = bool((f.frame.x >> q) & 1) ^ loc.flip
        if flipped:
            f.classical_flips ^= {loc.record}
        f.frame = _clear(f.frame, loc.qubits)
    elif kind == LocationKind.MEASURE_LOGICAL:
        code: StabilizerCode = circuit.codes[loc.code]
        e = f.frame.restrict(loc.qubits)
        e = e * code.decode(code.syndrome(e))
        if not e.commutes(code.logical_z):
            f.classical_flips ^= {loc.record}
        f.frame = _clear(f.frame, loc.qubits)
    elif kind == LocationKind.EC:
        code = circuit.codes[loc.code]
        e = f.frame.restrict(loc.qubits)
        e = (e * code.decode(code.syndrome(e))).unsigned()
        f.frame = (_clear(f.frame, loc.qubits) * e.embed(loc.qubits, circuit.width)).unsigned()
    elif kind == LocationKind.CLASSICAL_PAULI:
        if len(loc.condition) > 1:
            raise BackendUnsupported(f"location {loc.id}: multi-record conditions need the statevector backend")
        if loc.condition and loc.condition[0][0] in f.classical_flips:
            f.frame = (f.frame * loc.pauli).unsigned()
        elif not loc.condition and loc.label == "fault":
            f.frame = (f.frame * loc.pauli).unsigned()
    else:
        raise ValueError(f"unknown location kind {kind!r}")


def propagate_frame(circuit: Circuit, fault) -> PauliFrame:
    """Frame left by a single ``FaultEvent`` after the rest of ``circuit``.

    Faults attached before a measurement enter the frame just before it; all
    others enter just after their location.  A measurement-flip fault only
    toggles its record.
    """
    from .faults import attaches_before

    idx = circuit.index_of(fault.location_id)
    loc = circuit.locations[idx]
    f = PauliFrame(PauliString(circuit.width))
    if fault.measurement_flip:
        f.classical_flips.add(loc.record)
        start = idx + 1
        # the flipped measurement itself collapses nothing new in the frame
        f.frame = _clear(f.frame, loc.qubits)
    else:
        f.frame = fault.pauli.embed(fault.qubits, circuit.width).unsigned()
        start = idx if attaches_before(loc) else idx + 1
    for l in circuit.locations[start:]:
        frame_step(circuit, l, f)
    return f
