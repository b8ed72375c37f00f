"""Regenerate the code files under tests/fixtures/ and configs/codes/."""

import itertools
import json
from pathlib import Path

import numpy as np

from ftgadgets.codes import code_to_dict, GenericCode, concatenate, steane

ROOT = Path(__file__).resolve().parents[1]


def dicke(n: int, k: int) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    for ones in itertools.combinations(range(n), k):
        v[sum(1 << q for q in ones)] = 1
    return v / np.linalg.norm(v)


def perm9() -> GenericCode:
    # permutation-invariant 9-qubit code, not a stabilizer code
    zero = (dicke(9, 0) + np.sqrt(3) * dicke(9, 6)) / 2
    one = (np.sqrt(3) * dicke(9, 3) + dicke(9, 9)) / 2
    return GenericCode("perm9", 9, zero, one, distance=3, transversal_z=True)


def corrupted() -> GenericCode:
    # |0> = |001>, |1> = |110>: odd-weight string in |0>, so Z^3 is not logical Z
    zero = np.zeros(8, dtype=complex)
    one = np.zeros(8, dtype=complex)
    zero[0b100] = 1  # qubit 2 set
    one[0b011] = 1
    return GenericCode("corrupted3", 3, zero, one, distance=1, transversal_z=True)


def write(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print("wrote", path.relative_to(ROOT))


if __name__ == "__main__":
    write(ROOT / "tests/fixtures/perm9.json", code_to_dict(perm9()))
    write(ROOT / "tests/fixtures/corrupted3.json", code_to_dict(corrupted()))
    write(ROOT / "configs/codes/perm9.json", code_to_dict(perm9()))
    write(ROOT / "configs/codes/steane_rep7.json", code_to_dict(concatenate(steane(), 7)))
