"""Check the decomposition E1 (x) E2 = G . F of the Example 1 pair and search it for witnesses."""
from eachannels import families, qchannel
from eachannels.classify import auto, search

problems = auto.example1_diagnostics()
print("decomposition holds" if not problems else "\n".join(problems))

e1 = families.pauli_diagonal(*map(float, auto.EXAMPLE1_E1))
e2 = families.pauli_diagonal(*map(float, auto.EXAMPLE1_E2))
print("sum of squares:", auto.squared_norm(e1), auto.squared_norm(e2))
v = search.ea_numeric(qchannel.tensor(qchannel.with_cp_flag(e1), qchannel.with_cp_flag(e2)))
print("numeric search:", v.status.value, f"best min PT eigenvalue {v.min_pt_eig:.3e}")
print("ea_auto:", auto.ea_auto(e1, e2).criterion.value)
