"""The same 1/4 in every dimension, plus higher spins."""
import numpy as np

from temporal_hardy import RecipeInput, evaluate, general_spin_setting, recipe_setting

rng = np.random.default_rng(1)
print(" d   n  m   p4            max residual")
for d in range(2, 11):
    n = m = max(1, d // 2)
    rep = evaluate(*recipe_setting(RecipeInput.build(d, n, m, rng)))
    print(f"{d:2d}  {n:2d} {m:2d}   {rep.p4:.12f}  {max(rep.residuals):.1e}")

print("\n s    theta        closed form   p4            P[a2] weight")
for s in ("1", "3/2", "2", "5/2", "3", "7/2", "4"):
    r = general_spin_setting(s)
    print(f"{s:>4}  {r.theta:.9f}  {r.closed_form_theta:.9f}  {r.p4:.12f}  {r.a2_weight:.12f}")
