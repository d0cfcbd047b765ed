"""Walk through the steady states of the reference chemostat.

Prints every candidate equilibrium with its existence margins, the analytic
and eigenvalue stability verdicts, then repeats the exercise with
biomass-dependent hydrolysis where the X0 level comes from a scalar root find.
"""
from triad import Linear, ModelParams, classify, equilibria, multiplicity
from triad.config import load_config
import pathlib

HERE = pathlib.Path(__file__).parent


def show(p):
    for rec in equilibria(p):
        if not rec.exists:
            why = ", ".join(f"{n} ({s:+.3g})" for n, s in rec.existence_margins if s <= 0)
            print(f"  {str(rec.label):6s} absent: {why or 'undefined break-even level'}")
            continue
        v = classify(p, rec)
        state = " ".join(f"{x:9.4g}" for x in rec.state)
        print(f"  {str(rec.label):6s} [{state}]  analytic {v.analytic.value}  "
              f"numeric {v.numeric.value}  max Re {v.max_real_part:+.3g}")


p = load_config(HERE / "reference.json").model
print("first-order hydrolysis, state order X0 S1 X1 S2 X2")
show(p)

# biomass-dependent hydrolysis: two roots of xi = delta for this feed
q = ModelParams.from_dict({
    "hydrolysis_mode": "biomass", "D": 0.5, "S1in": 0.6, "S2in": 1.0, "X0in": 5.0,
    "k0": 1.0, "k1": 2.0, "k2": 0.5, "k3": 1.5, "alpha0": 0.5,
    "mu0": {"kind": "linear", "c": 1.0},
    "mu1": {"kind": "monod", "m": 1.0, "K": 1.0},
    "mu2": {"kind": "haldane", "m": 1.0, "K": 1.0, "KI": 10.0}})
rep = multiplicity(q)
print(f"\nbiomass-dependent hydrolysis: N = {rep.N} (case {rep.branch_case}), "
      f"roots {['%.6g' % r for r in rep.roots]}, S1in_bar = {rep.s1in_bar:.4g}")
show(q)
