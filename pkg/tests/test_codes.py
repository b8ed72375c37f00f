import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ftgadgets.codes import (
    CodeFormatError,
    GenericCode,
    StabilizerCode,
    check_parity_property,
    code_from_dict,
    code_to_dict,
    concatenate,
    encode,
    five_qubit,
    ideal_recover,
    load_code,
    repetition,
    restricted_parity_support,
    steane,
    validate,
)
from ftgadgets.pauli import PauliString, paulis_of_weight
from ftgadgets.statevector import DenseState, apply_pauli, expectation, fidelity, pauli_action

from conftest import FIXTURES

BUILTINS = [steane(), five_qubit()] + [repetition(n) for n in range(1, 10)]


def P(t):
    return PauliString.from_text(t)


@pytest.mark.parametrize("code", BUILTINS, ids=lambda c: c.name)
def test_builtins_validate(code):
    rep = validate(code)
    assert rep.valid, str(rep)


def test_validation_catches_bad_codes():
    bad = StabilizerCode("bad", 2, (P("XI"),), P("XX"), P("ZI"), 1)
    rep = validate(StabilizerCode("anti", 3, (P("XII"), P("ZII")), P("XXX"), P("ZZZ"), 1))
    assert not rep.valid and any("XII and ZII anticommute" in v for v in rep.violations)
    assert not validate(bad).valid
    s = np.sqrt(0.99)
    z0 = np.array([1, 0, 0, 0, 0, 0, 0, 0], dtype=complex)
    z1 = np.zeros(8, dtype=complex)
    z1[0], z1[7] = 0.1, s
    rep = validate(GenericCode("overlap", 3, z0, z1, 1))
    assert any("overlap" in v for v in rep.violations)


def test_generic_rep3_is_valid():
    z0 = np.zeros(8, complex)
    z1 = np.zeros(8, complex)
    z0[0] = z1[7] = 1
    code = GenericCode("grep3", 3, z0, z1, 1, transversal_z=True)
    assert validate(code).valid and code.transversal_z_holds


def test_parity_examples():
    assert check_parity_property(repetition(3)).holds
    rep = check_parity_property(steane())
    assert rep.holds and rep.zero_support == 8
    bad = load_code(FIXTURES / "corrupted3.json")
    rep = check_parity_property(bad)
    assert not rep.holds and (0, "001") in rep.witnesses


@pytest.mark.parametrize("code", BUILTINS, ids=lambda c: c.name)
def test_parity_iff_transversal_z(code):
    assert check_parity_property(code).holds == code.transversal_z_holds


def test_even_repetition_lacks_transversal_z():
    assert not repetition(4).transversal_z_holds
    assert not check_parity_property(repetition(4)).holds


def test_restricted_support_examples():
    r = restricted_parity_support(steane())
    assert r.support == (0, 1, 2) and r.operator.letters == "ZZZIIII" and r.parity_holds
    assert restricted_parity_support(repetition(3)).support == (0,)
    # the only Z-type logical of [[5,1,3]] is ZZZZZ
    assert restricted_parity_support(five_qubit()).support == (0, 1, 2, 3, 4)
    assert [p.letters for p in five_qubit().z_type_logicals()] == ["ZZZZZ"]


@pytest.mark.parametrize("code", [steane(), five_qubit(), repetition(3), repetition(7)], ids=lambda c: c.name)
def test_restricted_support_at_least_distance(code):
    r = restricted_parity_support(code)
    assert r.weight >= code.distance
    assert check_parity_property(code, r.support).holds


def test_encode_examples():
    assert np.allclose(encode(repetition(3), 1, 0).amplitudes, np.eye(8)[0])
    s = 1 / np.sqrt(2)
    code = steane()
    st_ = encode(code, s, -1j * s)
    assert np.isclose(expectation(st_, code.logical_y).real, -1)
    c, sn = np.cos(np.pi / 8), np.sin(np.pi / 8)
    pi8 = encode(code, c, -1j * sn)
    want = c * code.codeword(0) - 1j * sn * code.codeword(1)
    assert np.isclose(fidelity(pi8, DenseState(7, want)), 1)


def test_logical_y_matches_i_x_z():
    for code in (steane(), five_qubit(), repetition(3)):
        y = code.logical_y
        ixz = (code.logical_x * code.logical_z).with_phase((code.logical_x * code.logical_z).phase_exp + 1)
        assert np.allclose(pauli_action(code.codeword(0), y), pauli_action(code.codeword(0), ixz))


@pytest.mark.parametrize("code", [steane(), five_qubit()], ids=lambda c: c.name)
def test_decoder_corrects_every_single_qubit_error(code):
    for e in paulis_of_weight(code.n, 1):
        r = e * code.decode(code.syndrome(e))
        assert code.syndrome(r) == 0 and code.logical_action(r) == (0, 0)


def test_recover_examples():
    code = steane()
    zero = DenseState(7, code.codeword(0))
    for err, ok in ((P("IIXIIII"), True), (P("XXIIIII"), False)):
        br = ideal_recover(code, apply_pauli(zero.copy(), err))
        assert len(br) == 1
        assert np.isclose(fidelity(br[0].state, zero), 1.0 if ok else 0.0)
    rep = repetition(3)
    br = ideal_recover(rep, apply_pauli(DenseState(3, rep.codeword(0)), P("XII")))
    assert np.allclose(br[0].state.amplitudes, np.eye(8)[0])


@given(st.integers(0, 10**6))
def test_recover_without_error_is_identity(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    nrm = np.hypot(abs(a), abs(b))
    for code in (steane(), load_code(FIXTURES / "perm9.json")):
        st_ = encode(code, a / nrm, b / nrm)
        br = ideal_recover(code, st_.copy())
        assert len(br) == 1 and not br[0].unrecoverable
        assert fidelity(br[0].state, st_) > 1 - 1e-9


@given(st.integers(0, 26), st.sampled_from("XYZ"), st.integers(0, 10**6))
def test_generic_recovery_fixes_single_errors(pos, letter, seed):
    code = load_code(FIXTURES / "perm9.json")
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    nrm = np.hypot(abs(a), abs(b))
    st_ = encode(code, a / nrm, b / nrm)
    err = PauliString.single(9, pos % 9, letter)
    for br in ideal_recover(code, apply_pauli(st_.copy(), err)):
        assert not br.unrecoverable
        assert fidelity(br.state, st_) > 1 - 1e-9


def test_perm9_is_not_a_stabilizer_code():
    code = load_code(FIXTURES / "perm9.json")
    assert validate(code).valid
    # a stabilizer codeword has equal-magnitude amplitudes on its support
    mags = np.abs(code.codeword(0)[np.abs(code.codeword(0)) > 1e-12])
    assert not np.allclose(mags, mags[0])
    assert code.transversal_z_holds and check_parity_property(code).holds


def _outer_then_inner(outer, L, bit):
    cat = concatenate(outer, L)
    v = np.zeros(1 << cat.n, complex)
    for b, amp in enumerate(outer.codeword(bit)):
        if abs(amp) < 1e-12:
            continue
        idx = 0
        for j in range(outer.n):
            if (b >> j) & 1:
                idx |= sum(1 << q for q in cat.block(j))
        v[idx] += amp
    return cat, v


@pytest.mark.parametrize("outer,L", [(repetition(3), 2), (repetition(3), 3), (steane(), 2)])
def test_concatenated_codewords_match_two_step_encoding(outer, L):
    for bit in (0, 1):
        cat, v = _outer_then_inner(outer, L, bit)
        assert abs(np.vdot(v, cat.codeword(bit))) ** 2 > 1 - 1e-9


def test_concatenated_structure():
    cat = concatenate(steane(), 7)
    assert cat.n == 49 and len(cat.generators) == 48 and validate(cat).valid
    cat3 = concatenate(steane(), 3)
    assert cat3.n == 21
    one_per_block = PauliString(21, 0, sum(1 << cat3.block(j)[0] for j in range(7)))
    assert cat3.syndrome(one_per_block) == 0 and cat3.logical_action(one_per_block) == (0, 1)
    assert check_parity_property(cat).holds
    doc = json.loads((FIXTURES.parent.parent / "configs/codes/steane_rep7.json").read_text())
    assert code_from_dict(doc).n == 49


def test_concatenated_decoder_corrects_single_errors():
    cat = concatenate(steane(), 7)
    for q in range(0, 49, 5):
        for letter in "XYZ":
            e = PauliString.single(49, q, letter)
            r = e * cat.decode(cat.syndrome(e))
            assert cat.syndrome(r) == 0 and cat.logical_action(r) == (0, 0)


@pytest.mark.parametrize("code", [steane(), five_qubit(), repetition(5), concatenate(repetition(3), 2)],
                         ids=lambda c: c.name)
def test_json_roundtrip(code):
    doc = json.loads(json.dumps(code_to_dict(code)))
    back = code_from_dict(doc)
    assert back.n == code.n and [str(g) for g in back.generators] == [str(g) for g in code.generators]


def test_generic_json_roundtrip_and_errors(tmp_path):
    code = load_code(FIXTURES / "perm9.json")
    back = code_from_dict(code_to_dict(code))
    assert np.allclose(back.codeword(1), code.codeword(1))
    with pytest.raises(CodeFormatError):
        code_from_dict({"kind": "stabilizer"})
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(CodeFormatError):
        load_code(p)
    with pytest.raises(KeyError):
        load_code("builtin:nonesuch")
