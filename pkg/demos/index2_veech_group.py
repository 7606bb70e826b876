"""Build Lambda for an index-2 subgroup of Gamma(2) and compute its stabilizer.

Run:  python3 demos/index2_veech_group.py
"""
from teichforge.pipeline import DeltaSpec, construct
from teichforge.veech import stabilizer, verify_theorem

# G1 swaps the two cosets, G2 fixes both
delta = DeltaSpec.from_perms((1, 0), (0, 1))
c = construct(delta, seed=0)
lam = c.layered

print(f"[Gamma(2):Delta] = {delta.index}, alpha splits into k = {len(c.alpha_reps)} classes")
print(f"refinement: degree {c.refined.subgroup.degree} after {c.refined.candidates} candidates")
print(f"primes p = {c.H.primes}, ell = {c.ell.ell}")
print("puncture detection:", c.H.signature())
print("index of Lambda in pi14, factored:", lam.factored_index())

res = stabilizer(lam, delta.index)
report = verify_theorem(res, delta, lam)
print(f"orbit size {res.orbit_size}; stabilizer generators:")
for g in res.schreier_generators:
    print("  ", g.as_list())
print("stabilizer equals Delta:", report.ok)
