"""Random generators shared by the test modules."""
import numpy as np


def random_hermitian(rng, dim, scale=1.0):
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (Z + Z.conj().T) / 2


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_frame(rng, dim, k, within=None):
    """Orthonormal (dim, k) frame, optionally inside the column span of ``within``."""
    if within is None:
        within = np.eye(dim, dtype=complex)
    Z = rng.normal(size=(within.shape[1], k)) + 1j * rng.normal(size=(within.shape[1], k))
    Q, _ = np.linalg.qr(Z)
    return within @ Q


def orth_complement(F):
    dim = F.shape[0]
    U, s, _ = np.linalg.svd(F, full_matrices=True)
    return U[:, F.shape[1]:] if F.shape[1] else np.eye(dim, dtype=complex)


def observable_on(rng, frame, name):
    """Observable with designated outcome 1 on span(frame), other values elsewhere."""
    from temporal_hardy.hardy import Observable

    dim = frame.shape[0]
    rest = orth_complement(frame)
    values = rng.choice([-2.0, -1.0, 0.0, 2.5], size=rest.shape[1])
    H = frame @ frame.conj().T + (rest * values) @ rest.conj().T
    return Observable((H + H.conj().T) / 2, 1.0, name)


def _rank(rng, lo, hi):
    return int(rng.integers(lo, hi + 1))


def set3_witness(rng, dim):
    """Setting/state obeying the operator orders of the set-3 chain.

    psi lies in the image of P[a1]; P[b1] is orthogonal to P[a1]; P[a2] sits
    inside P[b1].  P[b2] is arbitrary.
    """
    from temporal_hardy.hardy import MeasurementSetting

    Fa1 = random_frame(rng, dim, _rank(rng, 1, dim - 1))
    Fb1 = random_frame(rng, dim, _rank(rng, 1, dim - Fa1.shape[1]), within=orth_complement(Fa1))
    Fa2 = random_frame(rng, dim, _rank(rng, 1, Fb1.shape[1]), within=Fb1)
    Fb2 = random_frame(rng, dim, _rank(rng, 1, dim - 1))
    psi = random_frame(rng, dim, 1, within=Fa1)[:, 0]
    setting = MeasurementSetting(observable_on(rng, Fa1, "A1"), observable_on(rng, Fa2, "A2"),
                                 observable_on(rng, Fb1, "B1"), observable_on(rng, Fb2, "B2"))
    return setting, psi


def set4_witness(rng, dim):
    """Setting/state obeying the operator orders of the set-4 chain.

    P[b2] sits inside P[a1], P[b1] is orthogonal to P[a1] and P[a2] sits
    inside P[b1]; psi has weight on both P[a1] and its complement.
    """
    from temporal_hardy.hardy import MeasurementSetting

    Fa1 = random_frame(rng, dim, _rank(rng, 1, dim - 1))
    Fb2 = random_frame(rng, dim, _rank(rng, 1, Fa1.shape[1]), within=Fa1)
    Fb1 = random_frame(rng, dim, _rank(rng, 1, dim - Fa1.shape[1]), within=orth_complement(Fa1))
    Fa2 = random_frame(rng, dim, _rank(rng, 1, Fb1.shape[1]), within=Fb1)
    psi = random_state(rng, dim)
    setting = MeasurementSetting(observable_on(rng, Fa1, "A1"), observable_on(rng, Fa2, "A2"),
                                 observable_on(rng, Fb1, "B1"), observable_on(rng, Fb2, "B2"))
    return setting, psi
