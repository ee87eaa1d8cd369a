import numpy as np
import pytest
from scipy.optimize import linprog

from temporal_hardy.realism import Assignment, classical_max_success, enumerate_assignments
from temporal_hardy.spin import SPIN1_ALPHA, spin1_setting


def test_sixteen_distinct_assignments():
    rows = enumerate_assignments()
    assert len(rows) == 16
    assert len({(a.a1, a.a2, a.b1, a.b2) for a in rows}) == 16


def test_event_flags_follow_definitions():
    for a in enumerate_assignments():
        e1, e2, e3, e4 = a.events
        assert e1 == (a.a1 and a.b1)
        assert e2 == ((not a.a1) and a.b2)
        assert e3 == (a.a2 and not a.b1)
        assert e4 == (a.a2 and a.b2)


def test_named_assignments():
    assert Assignment(True, True, True, True).events == (True, False, False, True)
    assert Assignment(False, True, True, True).events == (False, True, False, True)
    assert Assignment(False, True, True, True).label() == "~a1,a2,b1,b2"


def test_no_assignment_realizes_event4_alone():
    assert sum(1 for a in enumerate_assignments() if a.events[3] and not any(a.events[:3])) == 0


def test_classical_max_is_zero():
    v = classical_max_success()
    assert v.classical_max_p4 == 0.0
    assert len(v.table) == 16
    assert sum(v.weights) == pytest.approx(1.0, abs=1e-12)
    for a, w in v.witnesses:
        assert not any(a.events[:3])


def _linprog_oracle(eps):
    E = np.array([a.events for a in enumerate_assignments()], dtype=float)
    res = linprog(-E[:, 3], A_ub=E[:, :3].T, b_ub=np.full(3, eps),
                  A_eq=np.ones((1, 16)), b_eq=[1.0], bounds=(0, None), method="highs")
    assert res.status == 0
    return -res.fun


@pytest.mark.parametrize("eps", [0.0, 1e-3, 0.01, 0.05, 0.1, 0.2, 1 / 3, 0.5, 1.0])
def test_relaxed_lp_matches_linprog(eps):
    v = classical_max_success(eps)
    assert v.classical_max_p4 == pytest.approx(_linprog_oracle(eps), abs=1e-12)
    assert v.classical_max_p4 <= 3 * eps + 1e-12
    w = np.array(v.weights)
    E = np.array([e for _, e in v.table], dtype=float)
    assert np.all(w >= 0) and w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(E[:, :3].T @ w <= eps + 1e-12)
    assert E[:, 3] @ w == pytest.approx(v.classical_max_p4, abs=1e-12)


def test_relaxed_lp_monotone():
    eps = np.linspace(0, 0.6, 61)
    vals = [classical_max_success(e).classical_max_p4 for e in eps]
    assert vals[0] == 0.0
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_unconstrained_is_one():
    v = classical_max_success(None)
    assert v.classical_max_p4 == pytest.approx(1.0, abs=1e-12)
    assert v.epsilon is None


def test_negative_epsilon():
    with pytest.raises(ValueError):
        classical_max_success(-0.1)


def test_quantum_classical_gap():
    assert spin1_setting(SPIN1_ALPHA).report().p4 > classical_max_success().classical_max_p4 + 0.24
