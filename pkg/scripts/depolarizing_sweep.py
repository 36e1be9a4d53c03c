"""Numeric 50x50 sweep of depol(q1) (x) depol(q2) and its agreement with q1 q2 = 1/3."""
import csv
import sys

from eachannels import cli

out = sys.argv[1] if len(sys.argv) > 1 else "depolarizing.csv"
n = sys.argv[2] if len(sys.argv) > 2 else "50"
cli.main(["sweep", "--method", "numeric", "--ch1", "depol:q={q1}", "--ch2", "depol:q={q2}",
          "--axis", f"q1=-1/3,1,{n}", "--axis", f"q2=-1/3,1,{n}", "--out", out])

rows = list(csv.DictReader(open(out)))
wrong = [r for r in rows
         if (r["status"] == "NotEA_certified") != (float(r["q1"]) * float(r["q2"]) > 1 / 3)]
print(f"{len(rows)} points, {len(wrong)} disagree with q1 q2 > 1/3")
