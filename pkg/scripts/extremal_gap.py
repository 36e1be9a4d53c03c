"""Where the reduction-operator test state fails to show entanglement for extremal pairs.

Counts grid points with <M> >= 0 and shows that the input state is still a
PT witness at each of them.
"""
import itertools
import math

import numpy as np

from eachannels import families, qchannel, qstate
from eachannels.classify import extremal

us = np.linspace(0, 2 * math.pi, 5, endpoint=False)
vs = np.linspace(0, math.pi, 5, endpoint=False)
bad, worst_pt = 0, -np.inf
for u1, v1, u2, v2 in itertools.product(us, vs, us, vs):
    st = extremal.extremal_test_state(u1, v1, u2, v2)
    if st.m_value < 0:
        continue
    bad += 1
    pair = qchannel.tensor(families.ruskai_extremal(u1, v1), families.ruskai_extremal(u2, v2))
    rho = np.outer(st.input_vector, st.input_vector.conj())
    worst_pt = max(worst_pt, qstate.min_pt_eig(qchannel.apply(pair, rho)))
print(f"<M> >= 0 at {bad} of {len(us) ** 2 * len(vs) ** 2} points")
print(f"largest min PT eigenvalue of the output there: {worst_pt:.4f}")
