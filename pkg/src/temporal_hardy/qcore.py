"""Dense Hermitian linear algebra and projective-measurement primitives.

Everything here works on plain complex numpy arrays.  Eigendecompositions are
computed with a cyclic complex Jacobi method so that results are deterministic
and independent of the LAPACK build; ``hermitian_eigen_batch`` runs the same
iteration over a stack of matrices, which is what parameter scans use.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConvergenceError",
    "SpectralDecomposition",
    "Projector",
    "as_cmatrix",
    "as_state",
    "hermitian_eigen",
    "hermitian_eigen_batch",
    "projector_for_outcome",
    "projector_from_frame",
    "complement",
    "identity_projector",
    "born_prob",
    "sequential_prob",
    "raw_sequential_prob",
    "psd_order",
    "min_eigenvalue",
]

HERMITIAN_TOL = 1e-10
STATE_NORM_TOL = 1e-12
DEFAULT_CLUSTER_TOL = 1e-8
OFFDIAG_REL_TOL = 1e-14
MAX_SWEEPS = 100
PHASE_FIX_TOL = 1e-10
SKIP_REL_TOL = 1e-18


class ConvergenceError(np.linalg.LinAlgError):
    """Jacobi iteration did not reach the off-diagonal threshold."""


def as_cmatrix(H, name: str = "matrix") -> np.ndarray:
    """Validate and return a square, finite complex matrix (copied)."""
    H = np.array(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] == 0:
        raise ValueError(f"{name}: expected a non-empty square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValueError(f"{name}: contains NaN or Inf entries")
    return H


def as_state(psi, dim: int | None = None, name: str = "state") -> np.ndarray:
    """Validate a normalized pure state vector."""
    psi = np.array(psi, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(psi)):
        raise ValueError(f"{name}: contains NaN or Inf entries")
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"{name}: dimension {psi.shape[0]} does not match {dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise ValueError(f"{name}: not normalized (norm = {norm!r})")
    return psi


def _hermitian_part(H: np.ndarray, name: str) -> np.ndarray:
    scale = max(1.0, float(np.linalg.norm(H)))
    if np.linalg.norm(H - H.conj().T) > HERMITIAN_TOL * scale:
        raise ValueError(f"{name}: matrix is not Hermitian")
    return 0.5 * (H + H.conj().T)


def _offdiag_norm(A: np.ndarray) -> np.ndarray:
    n = A.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(A[:, mask]) ** 2, axis=-1))


def _jacobi(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a (batch, n, n) stack of Hermitian matrices."""
    A = A.copy()
    batch, n, _ = A.shape
    V = np.broadcast_to(np.eye(n, dtype=complex), A.shape).copy()
    norms = np.linalg.norm(A, axis=(1, 2))
    thresh = OFFDIAG_REL_TOL * norms
    # pivots this small are far below thresh even summed over all n^2 entries
    negligible = np.maximum(SKIP_REL_TOL * norms, np.finfo(float).tiny)
    idx = np.arange(batch)
    for _ in range(MAX_SWEEPS):
        if np.all(_offdiag_norm(A) <= thresh):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[:, p, q]
                mag = np.abs(g)
                active = mag > negligible
                if not np.any(active):
                    continue
                a = A[:, p, p].real
                b = A[:, q, q].real
                safe = np.where(active, mag, 1.0)
                tau = (b - a) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                phase = np.where(active, g / safe, 1.0)
                c = np.where(active, c, 1.0)
                s = np.where(active, s, 0.0)
                # J acts on the (p, q) plane: columns [c, -s e^{-i phi}], [s, c e^{-i phi}]
                J = np.empty((batch, 2, 2), dtype=complex)
                J[:, 0, 0] = c
                J[:, 0, 1] = s
                J[:, 1, 0] = -s * np.conj(phase)
                J[:, 1, 1] = c * np.conj(phase)
                cols = A[:, :, [p, q]] @ J
                A[:, :, p] = cols[:, :, 0]
                A[:, :, q] = cols[:, :, 1]
                rows = np.conj(np.swapaxes(J, 1, 2)) @ A[:, [p, q], :]
                A[:, p, :] = rows[:, 0, :]
                A[:, q, :] = rows[:, 1, :]
                A[idx, p, q] = np.where(active, 0.0, A[:, p, q])
                A[idx, q, p] = np.where(active, 0.0, A[:, q, p])
                A[:, p, p] = A[:, p, p].real
                A[:, q, q] = A[:, q, q].real
                vcols = V[:, :, [p, q]] @ J
                V[:, :, p] = vcols[:, :, 0]
                V[:, :, q] = vcols[:, :, 1]
    else:
        if not np.all(_offdiag_norm(A) <= thresh):
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    return np.diagonal(A, axis1=1, axis2=2).real.copy(), V


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # first component above PHASE_FIX_TOL made real positive, per column
    mags = np.abs(V)
    first = np.argmax(mags > PHASE_FIX_TOL, axis=-2)
    lead = np.take_along_axis(V, first[..., None, :], axis=-2)
    lead_mag = np.abs(lead)
    factor = np.where(lead_mag > 0, np.conj(lead) / np.where(lead_mag > 0, lead_mag, 1.0), 1.0)
    V = V * factor
    # rounding in the product can leave a tiny imaginary part on the lead entry
    np.put_along_axis(V, first[..., None, :], lead_mag.astype(V.dtype), axis=-2)
    return V


def _clusters(eigenvalues: np.ndarray, cluster_tol: float) -> tuple[tuple[int, ...], ...]:
    radius = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    gap = cluster_tol * (radius if radius > 0 else 1.0)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(eigenvalues)):
        if eigenvalues[i] - eigenvalues[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues, eigenvector columns and degenerate clusters."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[tuple[int, ...], ...]
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def cluster_values(self) -> np.ndarray:
        return np.array([self.eigenvalues[list(c)].mean() for c in self.clusters])


def _sort_and_package(w, V, cluster_tol):
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = _fix_phases(V[:, order])
    return SpectralDecomposition(w, V, _clusters(w, cluster_tol), cluster_tol)


def hermitian_eigen(H, tol: float = DEFAULT_CLUSTER_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    ``tol`` is the relative gap (scaled by the spectral radius) below which
    neighbouring eigenvalues are grouped into one degenerate cluster.
    """
    H = _hermitian_part(as_cmatrix(H), "matrix")
    w, V = _jacobi(H[None])
    return _sort_and_package(w[0], V[0], tol)


def hermitian_eigen_batch(Hs, tol: float = DEFAULT_CLUSTER_TOL) -> list[SpectralDecomposition]:
    """Same as :func:`hermitian_eigen` over a stack of equally sized matrices."""
    Hs = np.array(Hs, dtype=complex)
    if Hs.ndim != 3 or Hs.shape[1] != Hs.shape[2]:
        raise ValueError(f"expected a (batch, n, n) stack, got shape {Hs.shape}")
    if not np.all(np.isfinite(Hs)):
        raise ValueError("matrix stack contains NaN or Inf entries")
    Hs = np.stack([_hermitian_part(H, f"matrix {k}") for k, H in enumerate(Hs)])
    w, V = _jacobi(Hs)
    return [_sort_and_package(w[k], V[k], tol) for k in range(len(Hs))]


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector; validated on construction."""

    matrix: np.ndarray
    rank: int = field(default=-1)
    _origin: "Projector | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        P = as_cmatrix(self.matrix, "projector")
        if np.linalg.norm(P - P.conj().T) > 1e-12 * max(1.0, P.shape[0]):
            raise ValueError("projector is not Hermitian")
        P = 0.5 * (P + P.conj().T)
        if np.linalg.norm(P @ P - P) > 1e-10:
            raise ValueError("projector is not idempotent")
        tr = float(np.trace(P).real)
        rank = int(round(tr)) if self.rank < 0 else self.rank
        if abs(tr - rank) > 1e-8:
            raise ValueError(f"trace {tr} does not match rank {rank}")
        P.setflags(write=False)
        object.__setattr__(self, "matrix", P)
        object.__setattr__(self, "rank", rank)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        m = other.matrix if isinstance(other, Projector) else other
        return self.matrix @ m


def projector_from_frame(F) -> Projector:
    """Projector onto the column span of an orthonormal frame ``F`` (dim x k)."""
    F = np.asarray(F, dtype=complex)
    if F.ndim == 1:
        F = F[:, None]
    if F.shape[1] and np.linalg.norm(F.conj().T @ F - np.eye(F.shape[1])) > 1e-10:
        raise ValueError("frame columns are not orthonormal")
    return Projector(F @ F.conj().T, F.shape[1])


def identity_projector(dim: int) -> Projector:
    return Projector(np.eye(dim, dtype=complex), dim)


def projector_for_outcome(spec: SpectralDecomposition, outcome: float,
                          cluster_tol: float | None = None) -> Projector:
    """Spectral projector of the eigenvalue cluster matching ``outcome``."""
    if cluster_tol is None:
        cluster_tol = spec.cluster_tol
    w = spec.eigenvalues
    radius = float(np.max(np.abs(w)))
    window = cluster_tol * (radius if radius > 0 else 1.0)
    hits = [k for k, c in enumerate(spec.clusters)
            if np.min(np.abs(w[list(c)] - outcome)) <= window]
    if not hits:
        raise ValueError(f"outcome {outcome!r} is not an eigenvalue (nearest {w[np.argmin(np.abs(w - outcome))]!r})")
    if len(hits) > 1:
        raise ValueError(f"outcome {outcome!r} matches {len(hits)} distinct eigenvalue clusters")
    cols = list(spec.clusters[hits[0]])
    V = spec.eigenvectors[:, cols]
    return Projector(V @ V.conj().T, len(cols))


def complement(p: Projector) -> Projector:
    """``I - P``; applying twice gives back the original matrix exactly."""
    if p._origin is not None:
        return p._origin
    eye = np.eye(p.dim, dtype=complex)
    return Projector(eye - p.matrix, p.dim - p.rank, _origin=p)


def _check_dims(psi: np.ndarray, *ps: Projector):
    for p in ps:
        if p.dim != psi.shape[0]:
            raise ValueError(f"dimension mismatch: state {psi.shape[0]} vs projector {p.dim}")


def born_prob(psi, p: Projector) -> float:
    """<psi|P|psi>, clamped to [0, 1]."""
    psi = np.asarray(psi, dtype=complex)
    _check_dims(psi, p)
    raw = float(np.vdot(psi, p.matrix @ psi).real)
    return min(1.0, max(0.0, raw))


def raw_sequential_prob(psi, first: Projector, second: Projector) -> float:
    """Unclamped ||P_second P_first psi||^2."""
    psi = np.asarray(psi, dtype=complex)
    _check_dims(psi, first, second)
    v = second.matrix @ (first.matrix @ psi)
    return float(np.vdot(v, v).real)


def sequential_prob(psi, first: Projector, second: Projector) -> float:
    """Joint probability of ``first`` at t1 followed by ``second`` at t2.

    Equals <psi|P1 P2 P1|psi> for a Lüders measurement with no dynamics in
    between.  Order matters.
    """
    return min(1.0, max(0.0, raw_sequential_prob(psi, first, second)))


def min_eigenvalue(H) -> float:
    return float(hermitian_eigen(H).eigenvalues[0])


def psd_order(p: Projector, q: Projector, tol: float = 1e-10) -> bool:
    """True iff ``p <= q`` in the Loewner order, i.e. ``q - p`` is PSD within ``tol``."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    return min_eigenvalue(q.matrix - p.matrix) >= -tol
