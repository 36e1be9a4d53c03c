import math
from fractions import Fraction

import numpy as np
import pytest

from eachannels import families, qchannel
from eachannels.classify import auto, search
from eachannels.classify.verdict import Criterion, SearchBudget, Status
from eachannels.errors import DomainError
from eachannels.qchannel import QubitChannel

SMALL = SearchBudget(grid_points_per_axis=5, refine_cells=6, refine_iters=150, restarts=3)


def _rotated(ch, rng):
    """Same channel seen through random local unitaries on both sides."""
    ua, ub = qchannel.random_unitary(rng), qchannel.random_unitary(rng)
    a, b = np.eye(4), np.eye(4)
    a[1:, 1:], b[1:, 1:] = qchannel.rotation_of_unitary(ua), qchannel.rotation_of_unitary(ub)
    return qchannel.with_cp_flag(QubitChannel(a @ ch.ptm @ b))


@pytest.mark.parametrize("c1, c2, status, criterion", [
    (families.phase_damping(0.0), families.ruskai_extremal(0.3, 0.3), Status.EA, Criterion.EB_FACTOR),
    (families.depolarizing(0.5), families.depolarizing(0.5), Status.EA, Criterion.DEPOLARIZING_PRODUCT),
    (families.depolarizing(1.0), families.depolarizing(0.34), Status.NOT_EA, Criterion.DEPOLARIZING_PRODUCT),
    (families.amplitude_damping(0.5), families.amplitude_damping(0.5), Status.NOT_EA, Criterion.EXTREMAL_RULE),
    (families.gad(0.3, 0.3), families.gad(0.3, 0.3), Status.NOT_EA, Criterion.GAD_BOUNDARY),
    (families.gad(0.7, 0.5), families.gad(0.7, 0.5), Status.EA, Criterion.UNITAL_NECESSARY_2LEA),
    (families.gad(0.3, 0.5), families.gad(0.3, 0.5), Status.NOT_EA, Criterion.DOT_PRODUCT_WITNESS),
    (families.pauli_diagonal(0.6, 0.6, 0.5), families.pauli_diagonal(0.1, 0.9, 0.2), Status.EA,
     Criterion.UNITAL_SUFFICIENT),
])
def test_dispatch(c1, c2, status, criterion):
    v = auto.ea_auto(c1, c2, SMALL)
    assert (v.status, v.criterion) == (status, criterion)
    if status is Status.NOT_EA:
        assert search.witness_value(qchannel.tensor(c1, c2), v.witness) == pytest.approx(v.min_pt_eig)


def test_dispatch_is_swap_symmetric(rng):
    chans = [families.depolarizing(0.8), families.amplitude_damping(0.2), families.gad(0.4, 0.2),
             families.pauli_diagonal(0.9, -0.8, -0.7), families.ruskai_extremal(1.0, 2.0)]
    for a in chans:
        for b in chans:
            va, vb = auto.ea_auto(a, b, SMALL), auto.ea_auto(b, a, SMALL)
            assert va.status is vb.status


def test_rotated_unital_pair_uses_diagonal_frames(rng):
    a = _rotated(families.pauli_diagonal(0.9, 0.8, 0.7), rng)
    b = _rotated(families.pauli_diagonal(0.85, 0.8, 0.7), rng)
    v = auto.ea_auto(a, b, SMALL)
    assert v.status is Status.NOT_EA and v.criterion is Criterion.DOT_PRODUCT_WITNESS


def test_rotated_extremal_pair_is_recognized(rng):
    a = families.ruskai_extremal(0.8, 0.4)
    ua = qchannel.CLIFFORDS[7][1]
    conj = np.eye(4)
    conj[1:, 1:] = qchannel.rotation_of_unitary(ua)
    v = auto.ea_auto(qchannel.with_cp_flag(QubitChannel(conj @ a.ptm)), a, SMALL)
    assert v.status is Status.NOT_EA and v.criterion is Criterion.EXTREMAL_RULE


def test_diagonal_frames_cover_signed_permutations():
    frames = auto.diagonal_frames(families.pauli_diagonal(0.5, 0.3, 0.1))
    lams = {tuple(np.round(f.lam, 9)) for f in frames}
    assert len(lams) == 24
    assert (0.5, 0.3, 0.1) in lams and (0.3, 0.5, 0.1) in lams and (-0.5, -0.3, 0.1) in lams
    for f in frames:
        # proper rotations on both sides keep the product of the lambdas
        assert np.isclose(np.prod(f.lam), 0.5 * 0.3 * 0.1)


def test_noncptp_rejected():
    with pytest.raises(DomainError):
        auto.ea_auto(QubitChannel(np.diag([1, 1, -1, 1])), families.depolarizing(0.5))


def test_example1_holds_and_detects_corruption():
    assert auto.verify_example1()
    f = auto.example1_f_diag()
    f[5] += Fraction(1, 10)
    assert any("G.F" in p for p in auto.example1_diagnostics(f_diag=f))
    bad = [Fraction(x) for x in auto.example1_f_diag()]
    bad[1] = Fraction(2)
    assert any("completely positive" in p for p in auto.example1_diagnostics(f_diag=bad))


def test_example1_pair_uses_decomposition():
    e1 = families.pauli_diagonal(1 / 20, 1 / 20, 1)
    e2 = families.depolarizing(2 / 3)
    v = auto.ea_auto(e1, e2, SMALL)
    assert v.status is Status.EA and v.criterion is Criterion.DECOMPOSITION
    # neither simple unital rule decides this pair
    assert auto.squared_norm(e1) > 1 and auto.squared_norm(e2) > 1
    assert float(np.diag(e1.block) @ np.diag(e2.block)) < 1


def test_is_two_lea():
    assert auto.is_two_lea(families.depolarizing(0.57))
    assert not auto.is_two_lea(families.depolarizing(0.6))
    assert auto.is_two_lea(families.amplitude_damping(1.0), SMALL)
    assert not auto.is_two_lea(families.amplitude_damping(0.5), SMALL)


def test_property7_preconditions():
    eb = families.depolarizing(1 / 3)
    assert auto.verify_property7(families.depolarizing(0.57), eb, 0.3)
    with pytest.raises(DomainError):
        auto.verify_property7(families.depolarizing(0.9), eb, 0.3)
    with pytest.raises(DomainError):
        auto.verify_property7(families.depolarizing(0.5), families.depolarizing(0.9), 0.3)
    with pytest.raises(DomainError):
        auto.verify_property7(families.depolarizing(0.5), eb, 1.3)


def test_gad_between_boundaries_is_not_certified_ea():
    g = 0.3
    p = 0.5 * (auto.gad.gad_bell_boundary(g) + auto.gad.gad_eb_boundary(g))
    ch = families.gad(p, g)
    assert auto.ea_auto(ch, ch, SMALL).status is not Status.EA
    assert math.isfinite(p)
