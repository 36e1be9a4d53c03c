import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eachannels import families, qchannel, qstate
from eachannels.errors import DomainError
from eachannels.qchannel import CPFlag, QubitChannel

import oracles

seeds = st.integers(0, 2 ** 32 - 1)


def _rho(rng):
    v = oracles.random_pure(rng)
    return np.outer(v, v.conj())


@given(seeds)
def test_ptm_matches_loop_oracle(seed):
    ops = oracles.stinespring_kraus(np.random.default_rng(seed))
    ch = qchannel.ptm_from_kraus(ops)
    assert np.allclose(ch.ptm, oracles.ptm_loop(ops), atol=1e-12)
    assert np.allclose(qchannel.choi_from_channel(ch), oracles.choi_loop(ops), atol=1e-12)


@given(seeds)
def test_choi_round_trip(seed):
    ch = qchannel.ptm_from_kraus(oracles.stinespring_kraus(np.random.default_rng(seed)))
    back = qchannel.channel_from_choi(qchannel.choi_from_channel(ch))
    assert np.abs(back.ptm - ch.ptm).max() < 1e-9
    assert np.allclose(qchannel.choi_from_channel(back), qchannel.choi_from_channel(ch), atol=1e-9)


def test_apply_channel_matches_kraus(rng):
    ops = oracles.stinespring_kraus(rng)
    ch = qchannel.ptm_from_kraus(ops)
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    assert np.allclose(qchannel.apply_channel(ch, rho), oracles.kraus_apply(ops, rho))


def test_tensor_apply_matches_kraus(rng):
    o1, o2 = oracles.stinespring_kraus(rng), oracles.stinespring_kraus(rng, 2)
    m = qchannel.tensor(qchannel.ptm_from_kraus(o1), qchannel.ptm_from_kraus(o2))
    rho = _rho(rng)
    assert np.allclose(qchannel.apply(m, rho), oracles.two_qubit_kraus_apply(o1, o2, rho), atol=1e-12)


def test_apply_on_non_hermitian_units_is_linear(rng):
    ops = oracles.stinespring_kraus(rng)
    m = qchannel.tensor(qchannel.ptm_from_kraus(ops), qchannel.identity_channel())
    unit = np.zeros((4, 4), dtype=complex)
    unit[0, 3] = 1
    e01 = np.array([[0, 1], [0, 0]], dtype=complex)
    expected = np.kron(oracles.kraus_apply(ops, e01), e01)
    assert np.allclose(qchannel.apply(m, unit, check=False), expected)


def test_choi16_of_identity_is_maximally_entangled():
    c = qchannel.choi16(qchannel.identity_map16())
    assert abs(np.trace(c) - 1) < 1e-12
    assert np.allclose(np.linalg.eigvalsh(c), [0] * 15 + [1], atol=1e-12)


def test_ptm16_from_kraus_matches_local_tensor(rng):
    o1, o2 = oracles.stinespring_kraus(rng), oracles.stinespring_kraus(rng)
    local = qchannel.tensor(qchannel.ptm_from_kraus(o1), qchannel.ptm_from_kraus(o2))
    joint = qchannel.ptm16_from_kraus([np.kron(a, b) for a in o1 for b in o2])
    assert np.allclose(local.ptm16, joint.ptm16, atol=1e-12)


def test_swap_map_exchanges_factors():
    a, b = families.depolarizing(0.3), families.amplitude_damping(0.4)
    assert np.allclose(qchannel.swap_map(qchannel.tensor(a, b)).ptm16, qchannel.tensor(b, a).ptm16)


def test_compose_order(rng):
    a = qchannel.tensor(families.amplitude_damping(0.5), qchannel.identity_channel())
    b = qchannel.tensor(families.ruskai_extremal(0.4, 1.0), qchannel.identity_channel())
    rho = _rho(rng)
    lhs = qchannel.apply(qchannel.compose(a, b), rho)
    assert np.allclose(lhs, qchannel.apply(a, qchannel.apply(b, rho)))


def test_is_cptp_and_flags():
    assert qchannel.is_cptp(families.depolarizing(-1 / 3))
    transpose = QubitChannel(np.diag([1.0, 1.0, -1.0, 1.0]))
    assert not qchannel.is_cptp(transpose)
    assert qchannel.with_cp_flag(transpose).cp is CPFlag.NOT_CP
    assert qchannel.with_cp_flag(families.depolarizing(0.2)).cp is CPFlag.CP


def test_not_trace_preserving_rejected():
    with pytest.raises(DomainError):
        QubitChannel(np.diag([0.5, 1, 1, 1]))


def test_overline_map():
    red = qchannel.overline_map(qchannel.identity_channel())
    assert np.allclose(red.ptm, np.diag([1, -1, -1, -1]))
    assert red.cp is CPFlag.NOT_CP
    assert qchannel.overline_map(families.depolarizing(0.3)).cp is CPFlag.CP
    with pytest.raises(DomainError):
        qchannel.overline_map(families.amplitude_damping(0.3))


@given(st.floats(-1 / 3, 1.0))
def test_overline_cp_iff_eb_for_depolarizing(q):
    bar = qchannel.overline_map(families.depolarizing(q))
    if abs(q - 1 / 3) > 1e-9:
        assert (bar.cp is CPFlag.CP) == (q <= 1 / 3)


def test_mix_and_mix16():
    m = qchannel.mix(0.25, families.depolarizing(1.0), families.depolarizing(0.0))
    assert np.allclose(m.ptm, families.depolarizing(0.25).ptm)
    with pytest.raises(DomainError):
        qchannel.mix(1.5, m, m)
    with pytest.raises(DomainError):
        qchannel.mix16([0.7, 0.7], [qchannel.identity_map16()] * 2)


def test_rotation_unitary_round_trip(rng):
    for _ in range(20):
        u = qchannel.random_unitary(rng)
        o = qchannel.rotation_of_unitary(u)
        assert np.allclose(o @ o.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(o) == pytest.approx(1.0)
        assert np.allclose(qchannel.rotation_of_unitary(qchannel.unitary_from_rotation(o)), o, atol=1e-12)


def test_unitary_conjugation_has_rotation_ptm(rng):
    u = qchannel.random_unitary(rng)
    ch = qchannel.ptm_from_kraus([u])
    assert np.allclose(ch.ptm[1:, 1:], qchannel.rotation_of_unitary(u), atol=1e-12)


def test_clifford_group():
    rots = [o for o, _ in qchannel.CLIFFORDS]
    assert len(rots) == 24
    keys = {tuple(np.round(o).ravel()) for o in rots}
    for a in rots:
        for b in rots[:5]:
            assert tuple(np.round(a @ b).ravel()) in keys
    for o, u in qchannel.CLIFFORDS:
        assert np.allclose(qchannel.rotation_of_unitary(u), o, atol=1e-12)


def test_signed_singular_values(rng):
    for _ in range(10):
        ch = qchannel.random_channel(rng)
        lam, u, vt = qchannel.signed_singular_values(ch)
        assert np.allclose(u @ np.diag(lam) @ vt, ch.block, atol=1e-12)
        assert np.linalg.det(u) == pytest.approx(1) and np.linalg.det(vt) == pytest.approx(1)


def test_records_round_trip(rng):
    ch = qchannel.random_channel(rng)
    for rep in ("ptm", "kraus"):
        back = qchannel.channel_from_record(qchannel.channel_to_record(ch, rep))
        assert np.allclose(back.ptm, ch.ptm, atol=1e-12)
    with pytest.raises(DomainError):
        qchannel.channel_from_record({"repr": "bogus"})


def test_random_channel_is_cptp(rng):
    for rank in (1, 2, 4):
        ch = qchannel.random_channel(rng, rank)
        assert qchannel.is_cptp(ch)
        assert qstate.min_eig_hermitian(qchannel.choi_from_channel(ch)) > -1e-12
