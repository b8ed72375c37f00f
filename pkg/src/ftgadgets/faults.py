"""Single-fault models, exhaustive enumeration and injection."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .circuit import Circuit, Location, LocationKind
from .pauli import PauliString

__all__ = [
    "FaultKind",
    "FaultModel",
    "FaultEvent",
    "attaches_before",
    "location_fault_set",
    "enumerate_single_faults",
    "inject",
    "sample_faults",
]


class FaultKind(str, enum.Enum):
    DEPHASING = "dephasing"
    DEPOLARIZING = "depolarizing"


_ONE = {FaultKind.DEPHASING: ("Z",), FaultKind.DEPOLARIZING: ("X", "Y", "Z")}
_TWO = {
    FaultKind.DEPHASING: ("IZ", "ZI", "ZZ"),
    FaultKind.DEPOLARIZING: tuple(
        sorted(a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II")
    ),
}


@dataclass(frozen=True)
class FaultModel:
    kind: FaultKind = FaultKind.DEPHASING
    includes_measurement_flips: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FaultKind(self.kind))

    @property
    def one_qubit(self) -> tuple[str, ...]:
        return _ONE[self.kind]

    @property
    def two_qubit(self) -> tuple[str, ...]:
        return _TWO[self.kind]


@dataclass(frozen=True)
class FaultEvent:
    """A Pauli on ``qubits`` at ``location_id``, or a measurement-record flip."""

    location_id: int
    qubits: tuple[int, ...] = ()
    pauli: PauliString | None = None
    measurement_flip: bool = False

    def __str__(self) -> str:
        if self.measurement_flip:
            return f"{self.location_id}:flip"
        return f"{self.location_id}:{','.join(map(str, self.qubits))}:{self.pauli.letters}"

    @classmethod
    def parse(cls, text: str) -> FaultEvent:
        """``loc:flip`` or ``loc:q0,q1:PAULI`` (Pauli letters per listed qubit)."""
        parts = text.strip().split(":")
        try:
            loc = int(parts[0])
            if len(parts) == 2 and parts[1] == "flip":
                return cls(loc, measurement_flip=True)
            if len(parts) == 3:
                qubits = tuple(int(q) for q in parts[1].split(",") if q != "")
                pauli = PauliString.from_text(parts[2])
                if pauli.n_qubits != len(qubits):
                    raise ValueError("Pauli length must match the qubit list")
                return cls(loc, qubits, pauli)
        except ValueError as exc:
            raise ValueError(f"bad fault spec {text!r}: {exc}") from exc
        raise ValueError(f"bad fault spec {text!r}; expected loc:qubits:PAULI or loc:flip")

    def sort_key(self) -> tuple:
        if self.measurement_flip:
            return (self.location_id, 1, (), "")
        return (self.location_id, 0, self.qubits, self.pauli.letters)

    def to_dict(self) -> dict:
        if self.measurement_flip:
            return {"location_id": self.location_id, "measurement_flip": True}
        return {"location_id": self.location_id, "qubits": list(self.qubits), "pauli": self.pauli.letters}


def attaches_before(loc: Location) -> bool:
    return loc.kind in (LocationKind.MEASURE_Z, LocationKind.MEASURE_LOGICAL)


def location_fault_set(loc: Location, model: FaultModel) -> list[FaultEvent]:
    """All single faults the model allows at ``loc``, in canonical order.

    Two-qubit gates take the two-qubit set; every other location takes the
    one-qubit set on each of its qubits (block-level idealized operations
    are faulted only at their boundary).  Classical corrections carry no
    qubit faults; physical measurements optionally add a record flip.
    """
    if loc.kind == LocationKind.CLASSICAL_PAULI:
        return []
    events = []
    if loc.kind == LocationKind.GATE and len(loc.qubits) == 2:
        for t in model.two_qubit:
            events.append(FaultEvent(loc.id, loc.qubits, PauliString.from_text(t)))
    else:
        for q in loc.qubits:
            for t in model.one_qubit:
                events.append(FaultEvent(loc.id, (q,), PauliString.from_text(t)))
    if loc.kind == LocationKind.MEASURE_Z and model.includes_measurement_flips:
        events.append(FaultEvent(loc.id, measurement_flip=True))
    return sorted(events, key=FaultEvent.sort_key)


def enumerate_single_faults(circuit: Circuit, model: FaultModel) -> list[FaultEvent]:
    out = []
    for loc in circuit.locations:
        out.extend(location_fault_set(loc, model))
    return out


def fault_location(circuit: Circuit, fault: FaultEvent) -> Location:
    loc = circuit.location(fault.location_id)
    if fault.measurement_flip:
        if loc.kind != LocationKind.MEASURE_Z:
            raise ValueError(f"location {loc.id} is not a physical measurement")
    else:
        for q in fault.qubits:
            if not 0 <= q < circuit.width:
                raise ValueError(f"fault qubit {q} outside the circuit")
    return loc


def fault_as_location(circuit: Circuit, fault: FaultEvent, loc: Location) -> Location:
    return Location(
        id=loc.id, timestep=loc.timestep, kind=LocationKind.CLASSICAL_PAULI, qubits=fault.qubits,
        label="fault", pauli=fault.pauli.embed(fault.qubits, circuit.width),
    )


def inject(circuit: Circuit, fault: FaultEvent) -> Circuit:
    """Copy of ``circuit`` with the fault materialized; ids are renumbered."""
    loc = fault_location(circuit, fault)
    idx = circuit.index_of(loc.id)
    locs = list(circuit.locations)
    if fault.measurement_flip:
        locs[idx] = replace(loc, flip=not loc.flip)
    else:
        extra = fault_as_location(circuit, fault, loc)
        locs.insert(idx if attaches_before(loc) else idx + 1, extra)
    out = circuit.with_locations(locs).renumbered()
    out.meta["injected"] = str(fault)
    return out


def sample_faults(
    circuit: Circuit, model: FaultModel, p: float, seed: int
) -> Iterator[list[FaultEvent]]:
    """Endless seeded Monte-Carlo draws: each location fails with probability ``p``."""
    rng = np.random.default_rng(seed)
    per_loc = [(loc, location_fault_set(loc, model)) for loc in circuit.locations]
    per_loc = [(l, evs) for l, evs in per_loc if evs]
    while True:
        draw = []
        for _, evs in per_loc:
            if rng.random() < p:
                draw.append(evs[int(rng.integers(len(evs)))])
        yield draw
