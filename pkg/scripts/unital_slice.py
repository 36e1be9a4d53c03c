"""The lambda1 = lambda2 cut of unital channels: E (x) E verdicts on a 100x100 grid.

Points outside the tetrahedron come out as NotChannel rows.
"""
import sys

from eachannels import cli

out = sys.argv[1] if len(sys.argv) > 1 else "unital_slice.csv"
spec = "pauli:l1={a},l2={a},l3={c}"
sys.exit(cli.main(["sweep", "--ch1", spec, "--ch2", spec,
                   "--axis", "a=-1,1,100", "--axis", "c=-1,1,100", "--out", out]))
