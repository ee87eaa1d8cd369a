"""Spin-3/2: the angle at which the tangent-series state is already normalized."""
import math

import numpy as np

from temporal_hardy.spin import (
    cot_polynomial,
    solve_theta32,
    spin32_setting,
    spin32_state_unnormalized,
    theta32_closed_form,
)

theta = solve_theta32()
print(f"theta*            = {theta:.16f}")
print(f"closed form       = {theta32_closed_form():.16f}")
print(f"2 acos(2^(-1/6))  = {2 * math.acos(2 ** (-1 / 6)):.16f}")
print(f"cot polynomial    = {cot_polynomial(theta):.2e}")
print(f"|psi| before norm = {np.linalg.norm(spin32_state_unnormalized(theta)):.16f}")
print("probabilities     =", spin32_setting(theta).report().probabilities)

# away from theta* the state needs normalizing and p4 drops
for th in (0.5, math.pi / 2, 2.2):
    v = spin32_state_unnormalized(th)
    print(f"  theta={th:.4f}  |psi|={np.linalg.norm(v):.4f}  p4={spin32_setting(th).report().p4:.6f}")
