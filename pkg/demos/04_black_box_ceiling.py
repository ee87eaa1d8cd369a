"""Blind search for a better Hardy setting never beats 1/4.

Nothing about the known constructions is given to the optimizer: it sees
random projectors and a penalty on the three zero conditions.
"""
import time

from temporal_hardy import SearchConfig, maximize_success

for d in (2, 3, 4):
    t0 = time.perf_counter()
    res = maximize_success(d, SearchConfig(restarts=16, seed=7))
    hits = sum(1 for _, p, r in res.restarts if p > 0.2499 and r <= 1e-8)
    print(f"d={d}: best p4 = {res.best_p4:.10f}, max residual = {max(res.residuals):.1e}, "
          f"{hits}/{len(res.restarts)} restarts near 1/4, {time.perf_counter() - t0:.1f}s")
