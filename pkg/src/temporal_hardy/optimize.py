"""Optimal constructions and black-box maximization of the success probability.

``recipe_setting`` builds the dimension-independent optimal setting from two
orthonormal families of vectors.  ``maximize_success`` treats the problem as a
black box: it searches over the designated-outcome projectors with a
quadratic penalty on the three zero conditions, using a Nelder-Mead simplex
search that advances all restarts in lockstep so a single vectorized objective
call serves every restart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hardy import (
    HARDY_BOUND,
    BoundViolation,
    HardyError,
    MeasurementSetting,
    Observable,
    evaluate,
)
from .qcore import projector_from_frame
from . import spin as _spin

CEILING_SLACK = 1e-6
RESIDUAL_TOL = 1e-8


# -- recipe -------------------------------------------------------------------

def _orthonormal(vectors: np.ndarray, tol: float = 1e-10) -> bool:
    G = vectors.conj().T @ vectors
    return np.linalg.norm(G - np.eye(G.shape[0])) <= tol


def _complement_basis(dim: int, against: np.ndarray, count: int,
                      rng: np.random.Generator | None = None) -> np.ndarray:
    """``count`` orthonormal columns orthogonal to the columns of ``against``."""
    if rng is None:
        seed = np.eye(dim, dtype=complex)
    else:
        seed = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, _ = np.linalg.qr(np.hstack([against, seed]))
    return Q[:, against.shape[1]:against.shape[1] + count]


@dataclass(frozen=True, eq=False)
class RecipeInput:
    """Two orthonormal families defining the optimal projectors.

    ``psi_basis`` (n columns) spans the image of P[~a1] = P[~b2] and must start
    with psi = (phi + phi_perp)/sqrt(2); ``phi_basis`` (m columns) spans the
    image of P[a2] = P[b1], containing phi but not phi_perp.
    """

    phi: np.ndarray
    phi_perp: np.ndarray
    psi_basis: np.ndarray
    phi_basis: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=complex)
        phi_perp = np.asarray(self.phi_perp, dtype=complex)
        Psi = np.asarray(self.psi_basis, dtype=complex)
        Phi = np.asarray(self.phi_basis, dtype=complex)
        dim = phi.shape[0]
        if abs(np.linalg.norm(phi) - 1) > 1e-12 or abs(np.linalg.norm(phi_perp) - 1) > 1e-12:
            raise HardyError("phi and phi_perp must be unit vectors")
        if abs(np.vdot(phi, phi_perp)) > 1e-12:
            raise HardyError("phi and phi_perp are not orthogonal")
        for name, M in (("psi_basis", Psi), ("phi_basis", Phi)):
            if M.ndim != 2 or M.shape[0] != dim:
                raise HardyError(f"{name} must be a {dim} x k array of column vectors")
            if not 1 <= M.shape[1] < dim:
                raise HardyError(f"{name} needs between 1 and {dim - 1} vectors, got {M.shape[1]}")
            if not _orthonormal(M):
                raise HardyError(f"{name} is not orthonormal")
        psi = (phi + phi_perp) / math.sqrt(2)
        if np.linalg.norm(Psi[:, 0] - psi) > 1e-10:
            raise HardyError("psi_basis must start with (phi + phi_perp)/sqrt(2)")
        if np.linalg.norm(Phi @ (Phi.conj().T @ phi) - phi) > 1e-10:
            raise HardyError("phi_basis does not contain phi")
        if np.linalg.norm(Phi.conj().T @ phi_perp) > 1e-10:
            raise HardyError("phi_basis is not orthogonal to phi_perp")
        for name, v in (("phi", phi), ("phi_perp", phi_perp), ("psi_basis", Psi), ("phi_basis", Phi)):
            object.__setattr__(self, name, v)

    @property
    def dim(self) -> int:
        return self.phi.shape[0]

    @property
    def psi(self) -> np.ndarray:
        return self.psi_basis[:, 0]

    @property
    def optimal(self) -> bool:
        """Whether <psi_i|phi> = 0 for i >= 2, which makes p4 = 1/4."""
        return bool(np.all(np.abs(self.psi_basis[:, 1:].conj().T @ self.phi) <= 1e-10))

    @classmethod
    def build(cls, dim: int, n: int = 1, m: int = 1,
              rng: np.random.Generator | None = None) -> RecipeInput:
        """Valid optimal input; standard basis vectors unless ``rng`` is given."""
        if dim < 2:
            raise HardyError("dimension must be at least 2")
        if not (1 <= n < dim and 1 <= m < dim):
            raise HardyError(f"need 1 <= n, m < dim, got n={n}, m={m}, dim={dim}")
        if rng is None:
            pair = np.eye(dim, dtype=complex)[:, :2]
        else:
            pair = _complement_basis(dim, np.zeros((dim, 0)), 2, rng)
        phi, phi_perp = pair[:, 0], pair[:, 1]
        psi = (phi + phi_perp) / math.sqrt(2)
        Psi = np.column_stack([psi, _complement_basis(dim, pair, n - 1, rng)])
        Phi = np.column_stack([phi, _complement_basis(dim, pair, m - 1, rng)])
        return cls(phi, phi_perp, Psi, Phi)


def recipe_setting(inp: RecipeInput) -> tuple[MeasurementSetting, np.ndarray]:
    """Setting with P[~a1] = P[~b2] = sum |psi_i><psi_i| and P[a2] = P[b1] = sum |phi_i><phi_i|.

    Observables are dichotomic: +1 on the designated subspace, -1 elsewhere.
    """
    not_a1 = projector_from_frame(inp.psi_basis)
    a1 = projector_from_frame(_complement_basis(inp.dim, inp.psi_basis, inp.dim - not_a1.rank))
    a2 = projector_from_frame(inp.phi_basis)
    first = Observable.dichotomic(a1, "A1=B2")
    second = Observable.dichotomic(a2, "A2=B1")
    return MeasurementSetting(A1=first, A2=second, B1=second, B2=first), inp.psi


# -- black-box search ----------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 32
    seed: int = 0
    ranks: tuple[int, int, int, int] = (1, 1, 1, 1)
    penalties: tuple[float, ...] = (1.0, 10.0, 1e2, 1e4, 1e6, 1e8)
    max_iterations: int = 3000
    rounds: int = 2
    initial_step: float = 0.05

    def validate(self, dim: int):
        if self.restarts < 1 or self.rounds < 1 or self.max_iterations < 1:
            raise ValueError("restarts, rounds and max_iterations must be >= 1")
        if any(b <= a for a, b in zip(self.penalties, self.penalties[1:])) or not self.penalties:
            raise ValueError("penalty schedule must be non-empty and strictly increasing")
        if len(self.ranks) != 4 or not all(1 <= k < dim for k in self.ranks):
            raise ValueError(f"ranks must be four integers in [1, {dim - 1}]")


@dataclass(frozen=True, eq=False)
class OptResult:
    dim: int
    best_p4: float
    parameters: np.ndarray
    residuals: tuple[float, float, float]
    restarts: tuple[tuple[str, float, float], ...]
    wall_iterations: int
    config: SearchConfig

    @property
    def feasible(self) -> bool:
        return max(self.residuals) <= RESIDUAL_TOL

    def frames(self) -> list[np.ndarray]:
        return _frames(self.parameters[None], self.dim, self.config.ranks)

    def setting(self) -> tuple[MeasurementSetting, np.ndarray]:
        """The optimized setting, with psi fixed to the first basis vector."""
        P = [projector_from_frame(F[0]) for F in self.frames()]
        psi = np.zeros(self.dim, dtype=complex)
        psi[0] = 1.0
        return MeasurementSetting.from_projectors(*P), psi

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "best_p4": self.best_p4,
            "residuals": list(self.residuals),
            "feasible": self.feasible,
            "parameters": self.parameters.tolist(),
            "restarts": [{"seed": s, "p4": v, "max_residual": r} for s, v, r in self.restarts],
            "wall_iterations": self.wall_iterations,
            "config": {
                "restarts": self.config.restarts,
                "seed": self.config.seed,
                "ranks": list(self.config.ranks),
                "penalties": list(self.config.penalties),
                "max_iterations": self.config.max_iterations,
                "rounds": self.config.rounds,
            },
        }


def _spans(dim: int, ranks) -> list[int]:
    """Rows available to each frame after fixing the unitary gauge.

    A unitary that fixes psi = e0 can rotate the frames, taken in order, so
    that frame j lies in the span of the first 1 + ranks[0] + ... + ranks[j]
    basis vectors (Gram-Schmidt on psi followed by the frame columns).
    """
    out, used = [], 1
    for k in ranks:
        used = min(dim, used + k)
        out.append(used)
    return out


def parameter_count(dim: int, ranks) -> int:
    return sum(2 * rows * k for rows, k in zip(_spans(dim, ranks), ranks))


def _frames(X: np.ndarray, dim: int, ranks) -> list[np.ndarray]:
    """Orthonormal (batch, dim, k) frames from real parameter rows."""
    out, start = [], 0
    for rows, k in zip(_spans(dim, ranks), ranks):
        size = 2 * rows * k
        Z = X[:, start:start + size].reshape(-1, 2, rows, k)
        Z = Z[:, 0] + 1j * Z[:, 1]
        if rows < dim:
            Z = np.concatenate([Z, np.zeros((Z.shape[0], dim - rows, k))], axis=1)
        if k == 1:
            F = Z / np.linalg.norm(Z, axis=1, keepdims=True)
        else:
            F, _ = np.linalg.qr(Z)
        out.append(F)
        start += size
    return out


def _probabilities(X: np.ndarray, dim: int, ranks) -> np.ndarray:
    """(batch, 4) Hardy probabilities with psi fixed to the first basis vector."""
    Fa1, Fa2, Fb1, Fb2 = _frames(X, dim, ranks)

    def proj(F, v):
        return np.einsum("bik,bk->bi", F, np.einsum("bik,bi->bk", F.conj(), v))

    def sq(v):
        return np.sum(np.abs(v) ** 2, axis=1)

    x = np.einsum("bik,bk->bi", Fa1, Fa1[:, 0, :].conj())      # P[a1] psi
    y = -x
    y[:, 0] += 1.0                                             # P[~a1] psi
    z = np.einsum("bik,bk->bi", Fa2, Fa2[:, 0, :].conj())      # P[a2] psi
    p1 = sq(np.einsum("bik,bi->bk", Fb1.conj(), x))
    p2 = sq(np.einsum("bik,bi->bk", Fb2.conj(), y))
    p3 = sq(z - proj(Fb1, z))
    p4 = sq(np.einsum("bik,bi->bk", Fb2.conj(), z))
    return np.stack([p1, p2, p3, p4], axis=1)


def batched_nelder_mead(f: Callable[[np.ndarray], np.ndarray], X0: np.ndarray,
                        max_iterations: int, xatol: float = 1e-12, fatol: float = 1e-16,
                        step: float = 0.05, check_every: int = 25):
    """Minimize ``f`` from every row of ``X0`` with independent simplexes.

    ``f`` maps an (m, n) array of points to m values.  Uses the
    dimension-adapted coefficients of Gao and Han.  Returns the best point and
    value per row plus the number of iterations run.
    """
    B, n = X0.shape
    alpha, gamma, rho, sigma = 1.0, 1 + 2 / n, 0.75 - 1 / (2 * n), 1 - 1 / n
    S = np.repeat(X0[:, None, :], n + 1, axis=1)
    for j in range(n):
        col = S[:, j + 1, j]
        S[:, j + 1, j] = np.where(col != 0, col * (1 + step), 0.00025)
    F = f(S.reshape(-1, n)).reshape(B, n + 1)
    active = np.ones(B, dtype=bool)
    rows = np.arange(B)
    it = 0
    for it in range(max_iterations):
        if it % check_every == 0:
            ib = np.argmin(F, axis=1)
            xb, fb = S[rows, ib], F[rows, ib]
            small = np.max(np.abs(S - xb[:, None]), axis=(1, 2)) <= xatol
            flat = np.max(F - fb[:, None], axis=1) <= fatol
            active &= ~(small & flat)
            if not active.any():
                break
        iw = np.argmax(F, axis=1)
        worst = F[rows, iw]
        masked = F.copy()
        masked[rows, iw] = -np.inf
        second = masked.max(axis=1)
        best = F.min(axis=1)
        w = S[rows, iw]
        c = (S.sum(axis=1) - w) / n
        d = c - w
        cand = np.stack([c + alpha * d, c + alpha * gamma * d, c + rho * alpha * d, c - rho * d], 1)
        fc = f(cand.reshape(-1, n)).reshape(B, 4)
        fr, fe, foc, fic = fc.T
        # 0 reflect, 1 expand, 2 outside contract, 3 inside contract, -1 shrink
        choice = np.full(B, -1)
        m1 = fr < best
        choice[m1] = np.where(fe[m1] < fr[m1], 1, 0)
        m2 = ~m1 & (fr < second)
        choice[m2] = 0
        m3 = ~m1 & ~m2 & (fr < worst)
        choice[m3 & (foc <= fr)] = 2
        m4 = ~m1 & ~m2 & ~m3
        choice[m4 & (fic < worst)] = 3
        upd = active & (choice >= 0)
        pick = np.maximum(choice, 0)
        S[rows[upd], iw[upd]] = cand[rows, pick][upd]
        F[rows[upd], iw[upd]] = fc[rows, pick][upd]
        shrink = np.flatnonzero(active & (choice < 0))
        if shrink.size:
            ibs = np.argmin(F[shrink], axis=1)
            xb = S[shrink, ibs][:, None]
            Ss = xb + sigma * (S[shrink] - xb)
            Fs = f(Ss.reshape(-1, n)).reshape(shrink.size, n + 1)
            Fs[np.arange(shrink.size), ibs] = F[shrink, ibs]
            S[shrink], F[shrink] = Ss, Fs
    ib = np.argmin(F, axis=1)
    return S[rows, ib], F[rows, ib], it + 1


def maximize_success(dim: int, config: SearchConfig | None = None) -> OptResult:
    """Search for the largest p4 compatible with the three zero conditions.

    Minimizes ``-p4 + mu * (p1 + p2 + p3)`` through the increasing penalty
    schedule, restarting the simplex ``config.rounds`` times per stage.  The
    state is fixed to the first basis vector: a common unitary on state and
    projectors leaves every probability unchanged.
    """
    config = config or SearchConfig()
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    config.validate(dim)
    ranks = config.ranks
    n_params = parameter_count(dim, ranks)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    X = np.stack([np.random.default_rng(s).normal(size=n_params) for s in seeds])

    iterations = 0
    for mu in config.penalties:
        def objective(Y, mu=mu):
            P = _probabilities(Y, dim, ranks)
            return -P[:, 3] + mu * P[:, :3].sum(axis=1)

        for _ in range(config.rounds):
            X, _, its = batched_nelder_mead(objective, X, config.max_iterations,
                                            step=config.initial_step)
            iterations += its

    P = _probabilities(X, dim, ranks)
    max_res = P[:, :3].max(axis=1)
    feasible = max_res <= RESIDUAL_TOL
    over = feasible & (P[:, 3] > HARDY_BOUND + CEILING_SLACK)
    if over.any():
        k = int(np.flatnonzero(over)[0])
        raise BoundViolation(f"restart {k} reached p4 = {P[k, 3]} with residuals {P[k, :3]}")
    if feasible.any():
        score = np.where(feasible, P[:, 3], -np.inf)
    else:
        score = -max_res
    k = int(np.argmax(score))  # first index wins ties
    log = tuple((f"{config.seed}:{i}", float(P[i, 3]), float(max_res[i]))
                for i in range(config.restarts))
    return OptResult(dim, float(P[k, 3]), X[k].copy(), tuple(float(v) for v in P[k, :3]),
                     log, iterations, config)


# -- scans ----------------------------------------------------------------------

FAMILIES = ("spin1_alpha", "spin32_theta", "recipe_dim")


@dataclass(frozen=True, eq=False)
class Curve:
    family: str
    params: np.ndarray
    probs: np.ndarray

    @property
    def argmax_index(self) -> int:
        p4 = self.probs[:, 3]
        top = np.flatnonzero(p4 == p4.max())
        return int(top[np.argmin(self.params[top])])

    @property
    def argmax(self) -> float:
        return float(self.params[self.argmax_index])

    @property
    def max_p4(self) -> float:
        return float(self.probs[self.argmax_index, 3])

    def rows(self):
        for x, p in zip(self.params, self.probs):
            yield (float(x), *map(float, p))

    def to_csv(self, fh):
        fh.write("param,p1,p2,p3,p4\n")
        for row in self.rows():
            fh.write(",".join(repr(v) for v in row) + "\n")

    def as_dict(self) -> dict:
        return {"family": self.family, "points": len(self.params), "argmax": self.argmax,
                "max_p4": self.max_p4}


def _family_point(family: str, x: float):
    if family == "spin1_alpha":
        st = _spin.spin1_setting(x)
        return st.setting, st.psi
    if family == "spin32_theta":
        st = _spin.spin32_setting(x)
        return st.setting, st.psi
    if family == "recipe_dim":
        d = int(round(x))
        if d != x or d < 2:
            raise ValueError(f"recipe_dim grid values must be integers >= 2, got {x}")
        return recipe_setting(RecipeInput.build(d, max(1, d // 2), max(1, d // 2)))
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def scan_family(family: str, grid) -> Curve:
    """Evaluate (p1, p2, p3, p4) along a one-parameter family."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("empty grid")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    probs = np.empty((grid.size, 4))
    for i, x in enumerate(grid):
        setting, psi = _family_point(family, float(x))
        probs[i] = evaluate(setting, psi).probabilities
    return Curve(family, grid, probs)
