"""E (x) E for generalized amplitude damping over a (p, gamma) grid.

The Bell check settles most points; the rest go to the numeric search, so
a 50x50 grid takes several minutes. Pass a smaller size as the second
argument for a quick look.
"""
import sys

from eachannels import cli
from eachannels.classify import gad

out = sys.argv[1] if len(sys.argv) > 1 else "gad.csv"
n = sys.argv[2] if len(sys.argv) > 2 else "50"
spec = "gad:p={p},gamma={g}"
cli.main(["sweep", "--ch1", spec, "--ch2", spec, "--axis", f"p=0,1,{n}", "--axis", f"g=0,1,{n}",
          "--out", out])

for g in (0.1, 0.3, 0.5):
    print(f"gamma={g}: Bell boundary p={gad.gad_bell_boundary(g):.6f}, "
          f"EB boundary p={gad.gad_eb_boundary(g):.6f}")
