"""Location-tagged circuit representation shared by builders, simulators and fault tools."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np

from .codes import Code, code_from_dict, code_to_dict
from .pauli import CliffordGate, CliffordMap, GateKind, PauliString

__all__ = [
    "LocationKind",
    "Location",
    "Circuit",
    "CircuitError",
    "PREPARE_LABELS",
    "circuit_to_jsonl",
    "circuit_from_jsonl",
]

CIRCUIT_SCHEMA = "ftgadgets.circuit/1"
PREPARE_LABELS = ("zero", "minus_i", "pi_8")


class CircuitError(ValueError):
    pass


class LocationKind:
    PREPARE = "prepare"
    GATE = "gate"
    IDLE = "idle"
    MEASURE_Z = "measure_z"
    MEASURE_LOGICAL = "measure_logical"
    CLASSICAL_PAULI = "classical_pauli"
    EC = "ec_subgadget"
    BLOCK_CLIFFORD = "block_clifford"

    ALL = (PREPARE, GATE, IDLE, MEASURE_Z, MEASURE_LOGICAL, CLASSICAL_PAULI, EC, BLOCK_CLIFFORD)


@dataclass(frozen=True, eq=False)
class Location:
    """One circuit location.

    ``pauli`` (classical_pauli) spans the full circuit width.  ``condition``
    is a conjunction of ``(record, value)`` pairs; an empty condition is
    unconditional.  ``code`` names a key of ``Circuit.codes``.
    """

    id: int
    timestep: int
    kind: str
    qubits: tuple[int, ...]
    gate: CliffordGate | None = None
    unitary: np.ndarray | None = None
    label: str | None = None
    code: str | None = None
    record: int | None = None
    pauli: PauliString | None = None
    condition: tuple[tuple[int, int], ...] = ()
    clifford: CliffordMap | None = None
    flip: bool = False  # injected classical flip of this measurement's record

    @property
    def is_clifford(self) -> bool:
        return self.unitary is None

    def describe(self) -> str:
        parts = [f"{self.id:4d} t={self.timestep:<3d} {self.kind:<16s}"]
        if self.gate is not None:
            parts.append(str(self.gate))
        elif self.unitary is not None:
            parts.append(f"U{self.qubits}")
        else:
            parts.append("q=" + ",".join(map(str, self.qubits)))
        if self.label:
            parts.append(self.label)
        if self.code:
            parts.append(f"code={self.code}")
        if self.record is not None:
            parts.append(f"-> r{self.record}")
        if self.pauli is not None:
            parts.append(str(self.pauli))
        if self.condition:
            parts.append("if " + " & ".join(f"r{r}=={v}" for r, v in self.condition))
        if self.flip:
            parts.append("[flipped]")
        return " ".join(parts)


@dataclass(eq=False)
class Circuit:
    width: int
    locations: list[Location]
    data_qubits: tuple[int, ...]
    codes: dict[str, Code] = field(default_factory=dict)
    postselect: tuple[tuple[int, int], ...] = ()
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index = {loc.id: i for i, loc in enumerate(self.locations)}

    def __len__(self) -> int:
        return len(self.locations)

    def index_of(self, location_id: int) -> int:
        try:
            return self._index[location_id]
        except KeyError:
            raise CircuitError(f"unknown location id {location_id}") from None

    def location(self, location_id: int) -> Location:
        return self.locations[self.index_of(location_id)]

    @property
    def n_records(self) -> int:
        return 1 + max((l.record for l in self.locations if l.record is not None), default=-1)

    @property
    def is_clifford(self) -> bool:
        return all(l.is_clifford for l in self.locations) and all(
            l.label != "pi_8" for l in self.locations if l.kind == LocationKind.PREPARE
        )

    def count_gates(self, kinds: Iterable[GateKind] | None = None) -> int:
        ks = None if kinds is None else set(kinds)
        return sum(
            1 for l in self.locations
            if l.kind == LocationKind.GATE and l.gate is not None and (ks is None or l.gate.kind in ks)
        )

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for l in self.locations:
            key = l.kind if l.gate is None else f"gate:{l.gate.kind.value}"
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def by_timestep(self) -> dict[int, list[Location]]:
        out: dict[int, list[Location]] = {}
        for l in self.locations:
            out.setdefault(l.timestep, []).append(l)
        return out

    def check(self) -> None:
        """Raise ``CircuitError`` if any structural invariant is broken."""
        last_id, last_t = None, None
        seen_records: set[int] = set()
        for l in self.locations:
            if last_id is not None and l.id <= last_id:
                raise CircuitError(f"location ids must ascend: {l.id} after {last_id}")
            if last_t is not None and l.timestep < last_t:
                raise CircuitError(f"location {l.id} goes back in time")
            last_id, last_t = l.id, l.timestep
            if l.kind not in LocationKind.ALL:
                raise CircuitError(f"location {l.id}: unknown kind {l.kind!r}")
            for q in l.qubits:
                if not 0 <= q < self.width:
                    raise CircuitError(f"location {l.id}: qubit {q} outside width {self.width}")
            if l.kind == LocationKind.PREPARE and l.label not in PREPARE_LABELS:
                raise CircuitError(f"location {l.id}: bad prepare label {l.label!r}")
            if l.kind == LocationKind.GATE and l.gate is not None and l.gate.qubits != l.qubits:
                raise CircuitError(f"location {l.id}: gate qubits disagree with location qubits")
            if l.code is not None and l.code not in self.codes:
                raise CircuitError(f"location {l.id}: unknown code {l.code!r}")
            for r, _ in l.condition:
                if r not in seen_records:
                    raise CircuitError(f"location {l.id}: condition on record r{r} before it exists")
            if l.pauli is not None and l.pauli.n_qubits != self.width:
                raise CircuitError(f"location {l.id}: Pauli width {l.pauli.n_qubits} != {self.width}")
            if l.record is not None:
                if l.record in seen_records:
                    raise CircuitError(f"record r{l.record} written twice")
                seen_records.add(l.record)

    def with_locations(self, locations: Sequence[Location]) -> Circuit:
        return Circuit(self.width, list(locations), self.data_qubits, self.codes, self.postselect, dict(self.meta))

    def renumbered(self) -> Circuit:
        return self.with_locations([replace(l, id=i) for i, l in enumerate(self.locations)])

    def text(self) -> str:
        return "\n".join(l.describe() for l in self.locations)


# ---------------------------------------------------------------------------
# JSON-lines export


def _loc_to_dict(l: Location) -> dict:
    d: dict[str, Any] = {"id": l.id, "timestep": l.timestep, "kind": l.kind, "qubits": list(l.qubits)}
    if l.gate is not None:
        d["gate"] = l.gate.kind.value
    if l.unitary is not None:
        d["unitary"] = [[[float(z.real), float(z.imag)] for z in row] for row in l.unitary]
    for key in ("label", "code", "record"):
        v = getattr(l, key)
        if v is not None:
            d[key] = v
    if l.pauli is not None:
        d["pauli"] = str(l.pauli)
    if l.condition:
        d["condition"] = [list(c) for c in l.condition]
    if l.clifford is not None:
        d["clifford"] = {
            "x_images": [str(p) for p in l.clifford.x_images],
            "z_images": [str(p) for p in l.clifford.z_images],
        }
    if l.flip:
        d["flip"] = True
    return d


def _loc_from_dict(d: dict) -> Location:
    qubits = tuple(int(q) for q in d["qubits"])
    gate = CliffordGate(GateKind(d["gate"]), qubits) if "gate" in d else None
    unitary = None
    if "unitary" in d:
        unitary = np.array([[complex(re, im) for re, im in row] for row in d["unitary"]])
    cliff = None
    if "clifford" in d:
        cliff = CliffordMap.from_text(d["clifford"]["x_images"], d["clifford"]["z_images"])
    return Location(
        id=int(d["id"]), timestep=int(d["timestep"]), kind=d["kind"], qubits=qubits,
        gate=gate, unitary=unitary, label=d.get("label"), code=d.get("code"),
        record=d.get("record"),
        pauli=PauliString.from_text(d["pauli"]) if "pauli" in d else None,
        condition=tuple((int(r), int(v)) for r, v in d.get("condition", ())),
        clifford=cliff, flip=bool(d.get("flip", False)),
    )


def circuit_to_jsonl(c: Circuit) -> str:
    header = {
        "schema": CIRCUIT_SCHEMA,
        "width": c.width,
        "data_qubits": list(c.data_qubits),
        "codes": {k: code_to_dict(v) for k, v in sorted(c.codes.items())},
        "postselect": [list(p) for p in c.postselect],
        "meta": c.meta,
    }
    lines = [json.dumps(header, sort_keys=True)]
    lines += [json.dumps(_loc_to_dict(l), sort_keys=True) for l in c.locations]
    return "\n".join(lines) + "\n"


def circuit_from_jsonl(text: str) -> Circuit:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CircuitError("empty circuit file")
    try:
        header = json.loads(lines[0])
        if header.get("schema") != CIRCUIT_SCHEMA:
            raise CircuitError(f"unsupported circuit schema {header.get('schema')!r}")
        locs = [_loc_from_dict(json.loads(ln)) for ln in lines[1:]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CircuitError(f"malformed circuit file: {exc}") from exc
    c = Circuit(
        width=int(header["width"]),
        locations=locs,
        data_qubits=tuple(header["data_qubits"]),
        codes={k: code_from_dict(v) for k, v in header["codes"].items()},
        postselect=tuple((int(r), int(v)) for r, v in header.get("postselect", ())),
        meta=header.get("meta", {}),
    )
    c.check()
    return c
