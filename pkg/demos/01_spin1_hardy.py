"""Spin-1 temporal Hardy argument, step by step.

Measure Sz or a rotated spin component at t1, then again at t2.  Three
sequential events never happen, yet the fourth happens a quarter of the time.
"""
import math

import numpy as np

from temporal_hardy import classify_condition_sets, evaluate, spin1_setting, verify_bound
from temporal_hardy.spin import SPIN1_ALPHA

st = spin1_setting(SPIN1_ALPHA)
print("alpha = %.6f rad (%.2f deg)" % (SPIN1_ALPHA, math.degrees(SPIN1_ALPHA)))
print("psi   =", np.round(st.psi.real, 6))

rep = evaluate(st.setting, st.psi)
for name, p in zip(("p1", "p2", "p3", "p4"), rep.probabilities):
    print(f"{name} = {p:.3e}")
print("success:", rep.success)

# which way the three zeros are realized
print("condition sets satisfied:", sorted(classify_condition_sets(st.setting, st.psi).satisfied_sets))

# the optimum sits at <psi|P[a2]|psi> = 1/2
chk = verify_bound(st.setting, st.psi)
print(f"<psi|P[a2]|psi> = {chk.born_a2:.12f}, bound holds: {chk.holds}")

# sweep alpha: the zeros survive everywhere, only p4 moves
for alpha in np.linspace(0.2, 2.8, 6):
    print(f"  alpha={alpha:.2f}  p4={spin1_setting(alpha).report().p4:.6f}")
