"""Time-local realistic models: deterministic value tables and their mixtures.

A realistic model assigns, in every run, a value to each of A1, A2, B1, B2.
Only whether each value is the designated one matters, so there are 16
deterministic assignments; any realistic model is a probability distribution
over them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

OBSERVABLES = ("A1", "A2", "B1", "B2")


@dataclass(frozen=True)
class Assignment:
    """True means the designated outcome (a1, a2, b1 or b2) is assigned."""

    a1: bool
    a2: bool
    b1: bool
    b2: bool

    @property
    def events(self) -> tuple[bool, bool, bool, bool]:
        """Which of the four Hardy events this table row realizes.

        1: A1=a1 and B1=b1;  2: A1=~a1 and B2=b2;
        3: A2=a2 and B1=~b1; 4: A2=a2 and B2=b2.
        """
        return (
            self.a1 and self.b1,
            (not self.a1) and self.b2,
            self.a2 and not self.b1,
            self.a2 and self.b2,
        )

    def label(self) -> str:
        return ",".join(("" if v else "~") + n for v, n in
                        zip((self.a1, self.a2, self.b1, self.b2), ("a1", "a2", "b1", "b2")))


def enumerate_assignments() -> list[Assignment]:
    return [Assignment(*bits) for bits in itertools.product((True, False), repeat=4)]


@dataclass(frozen=True)
class RealismVerdict:
    table: tuple[tuple[Assignment, tuple[bool, bool, bool, bool]], ...]
    classical_max_p4: float
    epsilon: float | None
    weights: tuple[float, ...]

    @property
    def witnesses(self) -> list[tuple[Assignment, float]]:
        return [(a, w) for (a, _), w in zip(self.table, self.weights) if w > 0]

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "classical_max_p4": self.classical_max_p4,
            "table": [{"assignment": a.label(), "events": [int(e) for e in ev]}
                      for a, ev in self.table],
            "witnesses": [{"assignment": a.label(), "weight": w} for a, w in self.witnesses],
        }


def _solve_exact(M: np.ndarray, b: np.ndarray) -> list[Fraction]:
    """Gauss-Jordan elimination in rationals; M is nonsingular."""
    n = len(b)
    A = [[Fraction(float(M[i, j])) for j in range(n)] + [Fraction(float(b[i]))] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        A[col] = [x / A[col][col] for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[-1] for row in A]


def _vertex_lp(E: np.ndarray, c: np.ndarray, eps: float) -> tuple[float, np.ndarray]:
    """max c.w  s.t.  E w <= eps, sum w = 1, w >= 0, by enumerating basic solutions.

    With slacks the equality system has 1 + len(E) rows, so every vertex has
    at most that many nonzero variables.  The winning vertex is re-solved in
    exact rational arithmetic, so e.g. the optimum 3*eps comes out as the
    correctly rounded float rather than carrying solver noise.
    """
    m, n = E.shape
    A = np.hstack([np.vstack([np.ones((1, n)), E]), np.vstack([np.zeros((1, m)), np.eye(m)])])
    b = np.concatenate([[1.0], np.full(m, eps)])
    cost = np.concatenate([c, np.zeros(m)])
    rows = m + 1
    best, best_basis = -np.inf, None
    for basis in itertools.combinations(range(n + m), rows):
        M = A[:, basis]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        xb = np.linalg.solve(M, b)
        if np.any(xb < -1e-12):
            continue
        value = float(cost[list(basis)] @ xb)
        if value > best + 1e-15:
            best, best_basis = value, basis
    basis = list(best_basis)
    xb = _solve_exact(A[:, basis], b)
    x = np.zeros(n + m)
    x[basis] = [max(float(v), 0.0) for v in xb]
    value = sum((Fraction(float(cost[j])) * v for j, v in zip(basis, xb)), Fraction(0))
    return float(value), x[:n]


def classical_max_success(epsilon: float | None = 0.0) -> RealismVerdict:
    """Largest prob(event 4) over realistic models with prob(events 1-3) <= epsilon.

    Assignments that trigger an event whose budget is zero are removed up
    front, so at ``epsilon == 0`` the result is exactly 0: every assignment
    realizing event 4 also realizes one of events 1-3.  ``epsilon=None``
    drops the constraints altogether.
    """
    if epsilon is None:
        verdict = classical_max_success(1.0)
        return RealismVerdict(verdict.table, verdict.classical_max_p4, None, verdict.weights)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    assignments = enumerate_assignments()
    table = tuple((a, a.events) for a in assignments)
    ev = np.array([e for _, e in table], dtype=float)
    keep = np.ones(len(assignments), dtype=bool) if epsilon > 0 else ~ev[:, :3].any(axis=1)
    idx = np.flatnonzero(keep)
    value, w = _vertex_lp(ev[idx, :3].T, ev[idx, 3], float(epsilon))
    weights = np.zeros(len(assignments))
    weights[idx] = w
    value = 0.0 if value == 0 else value
    return RealismVerdict(table, value, float(epsilon), tuple(float(x) for x in weights))
