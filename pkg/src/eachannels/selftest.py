"""Quick built-in consistency suites run by ``eachannels selftest``.

Every suite is deterministic for a fixed seed. Module attributes are looked
up at call time so a monkeypatched function is the one exercised.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import families, qchannel, qstate
from .classify import auto, extremal, gad, rules, search
from .classify.verdict import SearchBudget, Status

QUICK_BUDGET = SearchBudget(grid_points_per_axis=5, refine_cells=6, refine_iters=120, restarts=2)


@dataclass
class SuiteResult:
    name: str
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        if self.passed:
            return f"{self.name}: PASS"
        return f"{self.name}: FAIL ({'; '.join(self.failures)})"


def _check(failures: list[str], ok: bool, message: str):
    if not ok:
        failures.append(message)


def suite_qstate(seed: int) -> list[str]:
    f: list[str] = []
    rng = np.random.default_rng(seed)
    bell = np.outer(qstate.PSI_PLUS, qstate.PSI_PLUS.conj())
    _check(f, abs(qstate.min_pt_eig(bell) + 0.5) < 1e-12, "Bell PT eigenvalue is not -1/2")
    for _ in range(10):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = g + g.conj().T
        _check(f, np.abs(qstate.spectrum(h) - np.linalg.eigvalsh(h)).max() < 1e-10,
               "Jacobi spectrum disagrees with LAPACK")
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        _check(f, np.array_equal(qstate.partial_transpose(qstate.partial_transpose(rho)), rho),
               "double partial transpose is not the identity")
    return f


def suite_round_trips(seed: int) -> list[str]:
    f: list[str] = []
    rng = np.random.default_rng(seed)
    for _ in range(20):
        ch = qchannel.random_channel(rng)
        back = qchannel.channel_from_choi(qchannel.choi_from_channel(ch))
        _check(f, np.abs(back.ptm - ch.ptm).max() < 1e-9, "Kraus/PTM/Choi round trip drifted")
    return f


def suite_lemma1(seed: int) -> list[str]:
    f: list[str] = []
    rng = np.random.default_rng(seed)
    ident = qchannel.identity_channel()
    red = qchannel.overline_map(ident)
    _check(f, np.allclose(red.ptm, np.diag([1, -1, -1, -1])), "overline(identity) is not the reduction map")
    _check(f, red.cp is qchannel.CPFlag.NOT_CP, "reduction map flagged CP")
    d13 = qchannel.overline_map(families.depolarizing(1 / 3))
    _check(f, d13.cp is qchannel.CPFlag.CP, "overline of an EB channel is not CP")
    for _ in range(5):
        l1, l2 = rng.uniform(-0.3, 0.3, 3), rng.uniform(-0.3, 0.3, 3)
        e1, e2 = families.pauli_diagonal(*l1), families.pauli_diagonal(*l2)
        psi = qstate.schmidt_vectors(np.array([[rng.uniform(), *rng.uniform(0, math.pi, 4)]]))[0]
        rho = np.outer(psi, psi.conj())
        out = qchannel.apply(qchannel.tensor(e1, e2), rho)
        lhs = qchannel.apply(qchannel.tensor(qchannel.overline_map(e1), e2), rho)
        rhs = np.kron(qstate.I2, qstate.partial_trace(out, 1)) - out
        _check(f, np.abs(lhs - rhs).max() < 1e-10,
               "overline(E1) (x) E2 differs from I (x) Tr_1[out] - out")
    v = search.positive_map_min(qchannel.tensor(red, ident), QUICK_BUDGET)
    _check(f, abs(v + 0.5) < 1e-6, f"reduction (x) id minimum {v:.6g} is not -1/2")
    for q in (0.4, 0.7):
        d = families.depolarizing(q)
        v = search.positive_map_min(qchannel.tensor(qchannel.overline_map(d), d), QUICK_BUDGET)
        _check(f, (v >= -1e-9) == (3 * q * q <= 1), f"positivity of overline(depol {q}) (x) depol wrong")
    return f


def suite_example1(seed: int) -> list[str]:
    return auto.example1_diagnostics()


def suite_extremal(seed: int) -> list[str]:
    f: list[str] = []
    angles = [0.4, 2.5, 4.0]
    for u1, v1, u2, v2 in itertools.product(angles, [0.5, 2.4], angles, [0.5, 2.4]):
        st = extremal.extremal_test_state(u1, v1, u2, v2)
        direct = extremal.direct_m_value(families.ruskai_extremal(u1, v1),
                                         families.ruskai_extremal(u2, v2), st)
        _check(f, abs(direct - st.m_value) < 1e-10, f"closed-form <M> mismatch at {(u1, v1, u2, v2)}")
        verdict = extremal.ea_extremal(u1, v1, u2, v2)
        _check(f, verdict.status is Status.NOT_EA, f"extremal pair {(u1, v1, u2, v2)} not NotEA")
    return f


def suite_gad(seed: int) -> list[str]:
    f: list[str] = []
    _check(f, abs(gad.gad_eb_boundary(0.5) - 2 * (math.sqrt(2) - 1)) < 1e-12, "EB boundary at 1/2")
    _check(f, abs(gad.gad_bell_boundary(0.5) - (2 - math.sqrt(2))) < 1e-12, "Bell boundary at 1/2")
    for g in (0.2, 0.7):
        pb, pe = gad.gad_bell_boundary(g), gad.gad_eb_boundary(g)
        bell = qstate.BELL_PARAMS
        below = qchannel.tensor(families.gad(pb - 1e-3, g), families.gad(pb - 1e-3, g))
        above = qchannel.tensor(families.gad(pb + 1e-3, g), families.gad(pb + 1e-3, g))
        _check(f, search.witness_value(below, bell) < 0 < search.witness_value(above, bell),
               f"Bell transition misplaced at gamma={g}")
        _check(f, rules.is_eb(families.gad(pe + 1e-3, g)) and not rules.is_eb(families.gad(pe - 1e-3, g)),
               f"EB transition misplaced at gamma={g}")
    return f


def suite_properties(seed: int) -> list[str]:
    f: list[str] = []
    rng = np.random.default_rng(seed)
    # 4: swap symmetry of the analytic rules
    pairs = [(families.depolarizing(0.8), families.depolarizing(0.5)),
             (families.amplitude_damping(0.3), families.amplitude_damping(0.6)),
             (families.pauli_diagonal(0.9, 0.8, 0.7), families.depolarizing(0.9))]
    for a, b in pairs:
        va, vb = auto.ea_auto(a, b, QUICK_BUDGET), auto.ea_auto(b, a, QUICK_BUDGET)
        _check(f, (va.status, va.criterion) == (vb.status, vb.criterion), "verdict not swap symmetric")
    # 5: an EB factor makes any pair EA and leaves no witness
    eb = families.depolarizing(1 / 3)
    other = qchannel.random_channel(rng)
    _check(f, auto.ea_auto(eb, other, QUICK_BUDGET).status is Status.EA, "EB factor did not certify EA")
    pair = qchannel.tensor(eb, other)
    _check(f, search.ea_numeric(pair, QUICK_BUDGET).status is not Status.NOT_EA, "witness beside an EB factor")
    # 6: E (x) I is EA iff E is EB
    for q in (0.25, 0.45):
        v = search.ea_numeric(qchannel.tensor(families.depolarizing(q), qchannel.identity_channel()),
                              QUICK_BUDGET)
        _check(f, (v.status is Status.NOT_EA) == (not rules.is_eb(families.depolarizing(q))),
               f"E (x) I verdict disagrees with EB test at q={q}")
    # 7: mixing a 2-LEA channel with an EB channel keeps it 2-LEA
    _check(f, auto.verify_property7(families.depolarizing(0.57), eb, 0.5), "2-LEA lost under EB mixing")
    # 1 and 3: mixtures of EA maps and post-composition keep the search witness-free
    m1 = qchannel.tensor(eb, qchannel.identity_channel())
    m2 = qchannel.tensor(qchannel.identity_channel(), families.phase_damping(0.0))
    mixed = qchannel.mix16([0.5, 0.5], [m1, m2])
    _check(f, search.ea_numeric(mixed, QUICK_BUDGET).status is not Status.NOT_EA, "mixture of EA maps leaked")
    inner = qchannel.tensor(qchannel.random_channel(rng), qchannel.random_channel(rng))
    _check(f, search.ea_numeric(qchannel.compose(m1, inner), QUICK_BUDGET).status is not Status.NOT_EA,
           "EA map after another channel leaked")
    return f


SUITES = (
    ("qstate", suite_qstate),
    ("round_trips", suite_round_trips),
    ("lemma1", suite_lemma1),
    ("example1", suite_example1),
    ("extremal_closed_form", suite_extremal),
    ("gad_boundaries", suite_gad),
    ("properties", suite_properties),
)


def run_selftest(seed: int = 42) -> list[SuiteResult]:
    results = []
    for name, fn in SUITES:
        t0 = time.perf_counter()
        try:
            failures = fn(seed)
        except Exception as exc:  # a crash is a failure of that suite
            failures = [f"raised {type(exc).__name__}: {exc}"]
        results.append(SuiteResult(name, list(failures), time.perf_counter() - t0))
    return results
