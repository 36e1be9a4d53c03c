import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eachannels import families, qchannel
from eachannels.errors import DomainError, SpecParseError
from eachannels.families import parse_family_spec

unit = st.floats(0.0, 1.0)


def test_depolarizing_ptm_and_range():
    assert np.allclose(families.depolarizing(0.4).ptm, np.diag([1, 0.4, 0.4, 0.4]))
    assert qchannel.is_cptp(families.depolarizing(-1 / 3))
    with pytest.raises(DomainError, match="q="):
        families.depolarizing(1.2)
    with pytest.raises(DomainError):
        families.depolarizing(-0.5)


def test_pauli_diagonal_names_violated_inequality():
    with pytest.raises(DomainError, match=r"1\+l1\+l2\+l3 >= 0"):
        families.pauli_diagonal(-1, -1, -1)
    with pytest.raises(DomainError, match=r"1-l1-l2\+l3 >= 0"):
        families.pauli_diagonal(1, 1, -1)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_tetrahedron_is_the_cp_region(l1, l2, l3):
    ok = not families.tetrahedron_violations(l1, l2, l3, tol=0.0)
    margin = min(1 + l1 + l2 + l3, 1 + l1 - l2 - l3, 1 - l1 + l2 - l3, 1 - l1 - l2 + l3)
    if abs(margin) > 1e-9:
        assert ok == qchannel.is_cptp(qchannel.QubitChannel(np.diag([1, l1, l2, l3])), tol=1e-12)


def test_phase_damping():
    assert np.allclose(families.phase_damping(0.0).ptm, np.diag([1, 0, 0, 1]))


@given(unit, unit)
def test_gad_is_cptp_with_expected_ptm(p, gamma):
    ch = families.gad(p, gamma)
    assert qchannel.is_cptp(ch)
    s = math.sqrt(1 - p)
    expected = np.diag([1, s, s, 1 - p])
    expected[3, 0] = p * (2 * gamma - 1)
    assert np.allclose(ch.ptm, expected, atol=1e-12)


def test_gad_fixed_point():
    ch = families.gad(0.6, 0.3)
    fixed = np.diag([0.3, 0.7]).astype(complex)
    assert np.allclose(qchannel.apply_channel(ch, fixed), fixed)


def test_amplitude_damping_relaxes_to_its_fixed_state():
    # gamma = 0 fixes diag(0, 1), so |0><0| decays toward |1><1|
    ad = families.amplitude_damping(0.5)
    assert np.allclose(qchannel.apply_channel(ad, np.diag([1.0, 0.0])), np.diag([0.5, 0.5]))
    assert np.allclose(qchannel.apply_channel(ad, np.diag([0.0, 1.0])), np.diag([0.0, 1.0]))
    assert ad.translation[2] == pytest.approx(-0.5)
    assert np.allclose(families.amplitude_damping(1.0).ptm[:, 1:3], 0)


@given(st.floats(0, 2 * math.pi, exclude_max=True), st.floats(0, math.pi, exclude_max=True))
def test_ruskai_extremal_is_cptp_with_rank_two_choi(u, v):
    ch = families.ruskai_extremal(u, v)
    assert qchannel.is_cptp(ch, tol=1e-10)
    ev = np.linalg.eigvalsh(qchannel.choi_from_channel(ch))
    assert np.sum(ev > 1e-7) <= 2


def test_ruskai_range_checks():
    with pytest.raises(DomainError):
        families.ruskai_extremal(2 * math.pi, 0.1)
    with pytest.raises(DomainError):
        families.ruskai_extremal(0.1, math.pi)


@pytest.mark.parametrize("spec, ptm", [
    ("depol:q=0.5", np.diag([1, 0.5, 0.5, 0.5])),
    ("depol:0.5", np.diag([1, 0.5, 0.5, 0.5])),
    ("depol:q=1/3", np.diag([1, 1 / 3, 1 / 3, 1 / 3])),
    ("pd:l=0", np.diag([1, 0, 0, 1])),
    ("pauli:l1=0.1,l2=0.2,l3=0.3", np.diag([1, 0.1, 0.2, 0.3])),
    ("id", np.eye(4)),
])
def test_parse_simple_specs(spec, ptm):
    assert np.allclose(parse_family_spec(spec).ptm, ptm)


def test_parse_keyed_order_independent():
    a = parse_family_spec("gad:p=0.3,gamma=0.2")
    b = parse_family_spec("gad:gamma=0.2, p=0.3")
    assert np.allclose(a.ptm, b.ptm)
    assert np.allclose(parse_family_spec("extremal:u=0.3,v=1.1").ptm, families.ruskai_extremal(0.3, 1.1).ptm)
    assert np.allclose(parse_family_spec("ad:p=0.5").ptm, families.amplitude_damping(0.5).ptm)


def test_parse_json_and_file(tmp_path):
    rec = qchannel.channel_to_record(families.amplitude_damping(0.2))
    assert np.allclose(parse_family_spec(json.dumps(rec)).ptm, families.amplitude_damping(0.2).ptm)
    path = tmp_path / "ch.json"
    path.write_text(json.dumps(rec))
    assert np.allclose(parse_family_spec(f"@{path}").ptm, families.amplitude_damping(0.2).ptm)


@pytest.mark.parametrize("spec, token", [
    ("depol:q=abc", "abc"),
    ("foo:q=1", "foo"),
    ("depol:x=0.1", "x=0.1"),
    ("gad:p=0.1", "p=0.1"),
    ("depol", "depol"),
])
def test_parse_errors_name_token(spec, token):
    with pytest.raises(SpecParseError) as info:
        parse_family_spec(spec)
    assert info.value.token == token


def test_parse_out_of_range_is_domain_error():
    with pytest.raises(DomainError) as info:
        parse_family_spec("depol:q=2")
    assert not isinstance(info.value, SpecParseError)
