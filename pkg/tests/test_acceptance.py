"""Acceptance criteria, one test each, at the stated tolerances and time limits.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import random_hermitian, set3_witness, set4_witness
from temporal_hardy import cli
from temporal_hardy.hardy import Ensemble, classify_condition_sets, evaluate, mixed_success, refute_condition_set
from temporal_hardy.optimize import RecipeInput, SearchConfig, maximize_success, recipe_setting, scan_family
from temporal_hardy.qcore import hermitian_eigen_batch
from temporal_hardy.spin import (
    SPIN1_ALPHA,
    cot_polynomial,
    general_spin_setting,
    solve_theta32,
    spin1_setting,
    spin32_state_unnormalized,
    theta32_closed_form,
)

acceptance = pytest.mark.acceptance


def _cli_json(capsys, *argv):
    code = cli.main(list(argv))
    out, _ = capsys.readouterr()
    return code, json.loads(out)


@acceptance(1, "spin-1 reproduction")
def test_criterion_1_spin1(capsys):
    t0 = time.perf_counter()
    code, rep = _cli_json(capsys, "verify", "spin1")
    elapsed = time.perf_counter() - t0
    p = rep["payload"]["hardy"]["p"]
    assert code == 0
    assert max(p[:3]) <= 1e-12
    assert abs(p[3] - 0.25) <= 1e-9
    assert rep["payload"]["angle"] == math.acos(math.sqrt(2) - 1)
    assert elapsed < 1.0


@acceptance(2, "spin-3/2 reproduction")
def test_criterion_2_spin32(capsys):
    t0 = time.perf_counter()
    theta = solve_theta32()
    code, rep = _cli_json(capsys, "verify", "spin32")
    norm = np.linalg.norm(spin32_state_unnormalized(theta))
    elapsed = time.perf_counter() - t0
    p = rep["payload"]["hardy"]["p"]
    assert abs(cot_polynomial(theta)) <= 1e-12
    assert abs(theta - theta32_closed_form()) <= 1e-12
    assert code == 0
    assert max(p[:3]) <= 1e-12 and abs(p[3] - 0.25) <= 1e-9
    assert abs(norm - 1.0) <= 1e-10
    assert elapsed < 1.0


@acceptance(3, "dimension independence of the maximal construction")
def test_criterion_3_recipe():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    for d in range(2, 11):
        for inp in (RecipeInput.build(d), RecipeInput.build(d, max(1, d // 2), max(1, d // 2), rng)):
            rep = evaluate(*recipe_setting(inp))
            assert abs(rep.p4 - 0.25) <= 1e-10, (d, rep.p4)
            assert max(rep.residuals) <= 1e-12, (d, rep.residuals)
            assert max(rep.raw[:3]) <= 1e-12
    assert time.perf_counter() - t0 < 5.0


@acceptance(4, "ceiling property across scans and black-box search")
def test_criterion_4_ceiling():
    t0 = time.perf_counter()
    curves = [scan_family("spin1_alpha", np.linspace(1e-3, math.pi - 1e-3, 1000)),
              scan_family("spin32_theta", np.linspace(1e-3, 3.0, 1000))]
    for c in curves:
        feasible = np.max(c.probs[:, :3], axis=1) <= 1e-8
        assert feasible.sum() >= 1000
        assert np.all(c.probs[feasible, 3] <= 0.25 + 1e-6)
    for d in range(2, 7):
        res = maximize_success(d, SearchConfig(restarts=32, seed=0))
        for _, p4, max_res in res.restarts:
            if max_res <= 1e-8:
                assert p4 <= 0.25 + 1e-6
        assert res.feasible and max(res.residuals) <= 1e-8
        assert res.best_p4 >= 0.2499, (d, res.best_p4)
    assert time.perf_counter() - t0 < 300.0


_PREMISES = {
    3: ("P[b1]P[a1]psi", "P[~a1]psi", "P[~b1]P[a2]psi"),
    4: ("P[b1]P[a1]psi", "P[b2]P[~a1]psi", "P[~b1]P[a2]psi"),
}


@acceptance(5, "case analysis eliminates condition sets 1, 3 and 4")
def test_criterion_5_case_analysis():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    for set_id, make in ((3, set3_witness), (4, set4_witness)):
        for _ in range(100):
            setting, psi = make(rng, int(rng.integers(2, 9)))
            c = classify_condition_sets(setting, psi)
            assert all(c.residuals[k] <= 1e-12 for k in _PREMISES[set_id])
            cert = refute_condition_set(setting, psi, set_id)
            assert all(link.holds for link in cert.links)
            assert cert.holds
            assert evaluate(setting, psi).p4 <= 1e-9
            assert 1 not in c.satisfied_sets
            # set 1 would need both halves of psi to vanish
            assert c.residuals["P[a1]psi"] ** 2 + c.residuals["P[~a1]psi"] ** 2 == pytest.approx(1, abs=1e-12)
    assert time.perf_counter() - t0 < 30.0


@acceptance(6, "classical impossibility")
def test_criterion_6_classical(capsys):
    t0 = time.perf_counter()
    code, rep = _cli_json(capsys, "classical")
    assert code == 0
    assert rep["payload"]["classical_max_p4"] == 0.0
    assert len(rep["payload"]["table"]) == 16
    for eps in ("0.001", "0.01", "0.1"):
        code, rep = _cli_json(capsys, "classical", "--epsilon", eps)
        assert rep["payload"]["classical_max_p4"] <= 3 * float(eps)
    assert time.perf_counter() - t0 < 1.0


@acceptance(7, "general-spin conjecture evidence")
def test_criterion_7_general_spin():
    t0 = time.perf_counter()
    for s in (2, Fraction(5, 2), 3, Fraction(7, 2), 4):
        res = general_spin_setting(s)
        assert abs(res.p4 - 0.25) <= 1e-9, (s, res.p4)
        assert abs(res.a2_weight - 0.5) <= 1e-9, (s, res.a2_weight)
    assert time.perf_counter() - t0 < 10.0


@acceptance(8, "mixed-state bound")
def test_criterion_8_mixtures():
    rng = np.random.default_rng(8)
    st = spin1_setting(SPIN1_ALPHA)
    for _ in range(100):
        k = int(rng.integers(1, 6))
        states = []
        for _ in range(k):
            # any state orthogonal to |Sz=+1> satisfies the three zeros here
            v = np.zeros(3, dtype=complex)
            v[1:] = rng.normal(size=2) + 1j * rng.normal(size=2)
            states.append(v / np.linalg.norm(v))
        w = rng.dirichlet(np.ones(k))
        w[-1] = 1.0 - w[:-1].sum()
        ens = Ensemble(tuple(w), tuple(states))
        value = mixed_success(st.setting, ens)
        average = sum(wi * evaluate(st.setting, s).p4 for wi, s in zip(ens.weights, states))
        assert value <= 0.25 + 1e-9
        assert abs(value - average) <= 1e-12


@acceptance(9, "numerical core on 10^4 random Hermitian matrices")
def test_criterion_9_eigensolver():
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    dims = rng.integers(1, 17, size=10_000)
    checked = 0
    for d in range(1, 17):
        count = int(np.sum(dims == d))
        Hs = np.stack([random_hermitian(rng, d) for _ in range(count)])
        for H, spec in zip(Hs, hermitian_eigen_batch(Hs)):
            V = spec.eigenvectors
            assert np.linalg.norm(H - spec.reconstruct()) <= 1e-10 * np.linalg.norm(H)
            assert np.linalg.norm(V.conj().T @ V - np.eye(d)) <= 1e-10
            checked += 1
    assert checked == 10_000
    assert time.perf_counter() - t0 < 60.0
