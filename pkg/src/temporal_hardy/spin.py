"""Spin-s operators and the explicit spin Hardy settings.

Basis ordering is |m = s>, |m = s-1>, ..., |m = -s>, so ``Sz`` is
``diag(s, s-1, ..., -s)`` and the designated outcome ``+s`` is the first
basis vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hardy import HardyError, MeasurementSetting, Observable, evaluate
from .qcore import hermitian_eigen_batch

MAX_SPIN = 20
GRID_POINTS = 2048
GOLDEN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpinSystem:
    s: Fraction
    Sz: np.ndarray
    Sx: np.ndarray
    Sy: np.ndarray

    @property
    def dim(self) -> int:
        return int(2 * self.s + 1)

    def basis(self, m) -> np.ndarray:
        """|Sz = m>."""
        k = int(self.s - Fraction(m))
        if not 0 <= k < self.dim or Fraction(m) != self.s - k:
            raise ValueError(f"m={m} is not a valid projection for s={self.s}")
        v = np.zeros(self.dim, dtype=complex)
        v[k] = 1.0
        return v


def as_spin(s) -> Fraction:
    """Parse ``s`` (int, float, Fraction or strings like ``"5/2"``) as a half-integer."""
    try:
        f = Fraction(s).limit_denominator(1000) if isinstance(s, float) else Fraction(s)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValueError(f"spin {s!r} is not a number") from None
    if f <= 0 or (2 * f).denominator != 1:
        raise ValueError(f"spin {s!r} must be a positive half-integer")
    if f > MAX_SPIN:
        raise ValueError(f"spin {s!r} exceeds the cap of {MAX_SPIN}")
    return f


def spin_operators(s) -> SpinSystem:
    """Sz, Sx, Sy for spin ``s`` in units of hbar, built from the raising operator."""
    s = as_spin(s)
    sf = float(s)
    m = sf - np.arange(int(2 * s + 1))
    # <m+1|S+|m> = sqrt(s(s+1) - m(m+1)) sits on the superdiagonal
    plus = np.diag(np.sqrt(sf * (sf + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    minus = plus.conj().T
    Sx = 0.5 * (plus + minus)
    Sy = -0.5j * (plus - minus)
    Sz = np.diag(m).astype(complex)
    return SpinSystem(s, Sz, Sx, Sy)


def rotated_observable(sys: SpinSystem, theta: float, sign: int = +1) -> Observable:
    """cos(theta) Sz + sign * sin(theta) Sx with designated outcome +s."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    H = math.cos(theta) * sys.Sz + sign * math.sin(theta) * sys.Sx
    return Observable(H, float(sys.s), "A2=B1")


@dataclass(frozen=True, eq=False)
class SpinSetting:
    system: SpinSystem
    angle: float
    sign: int
    setting: MeasurementSetting
    psi: np.ndarray

    def report(self, **kw):
        return evaluate(self.setting, self.psi, **kw)


def _spin_setting(sys: SpinSystem, theta: float, sign: int, psi: np.ndarray) -> SpinSetting:
    Z = Observable(sys.Sz, float(sys.s), "A1=B2")
    R = rotated_observable(sys, theta, sign)
    setting = MeasurementSetting(A1=Z, A2=R, B1=R, B2=Z)
    if abs(np.vdot(sys.basis(sys.s), psi)) > 1e-12:
        raise HardyError("state is not orthogonal to |Sz=+s>")
    return SpinSetting(sys, float(theta), sign, setting, psi)


def spin1_setting(alpha: float, sign: int = -1) -> SpinSetting:
    """Spin-1 setting with psi = -sin(alpha)|0> + cos(alpha)|-1>.

    A1 = B2 = Sz and A2 = B1 = cos(alpha) Sz - sin(alpha) Sx, every designated
    outcome +1.  The three zero conditions hold for every alpha; p4 peaks at
    1/4 for alpha = arccos(sqrt(2) - 1).
    """
    if not 0.0 <= alpha <= math.pi:
        raise ValueError(f"alpha={alpha} outside [0, pi]")
    sys = spin_operators(1)
    psi = np.array([0.0, -math.sin(alpha), math.cos(alpha)], dtype=complex)
    return _spin_setting(sys, alpha, sign, psi)


SPIN1_ALPHA = math.acos(math.sqrt(2.0) - 1.0)


def spin32_state_unnormalized(theta: float) -> np.ndarray:
    t = math.tan(theta / 2)
    r3 = math.sqrt(3.0)
    return np.array([0.0, r3 * t, r3 * t * t, t ** 3], dtype=complex)


def spin32_setting(theta: float, sign: int = +1) -> SpinSetting:
    """Spin-3/2 setting; the state is normalized here unless theta is the optimal root."""
    if not 0.0 < theta < math.pi - 1e-6:
        raise ValueError(f"theta={theta} outside (0, pi) or too close to pi")
    sys = spin_operators(Fraction(3, 2))
    v = spin32_state_unnormalized(theta)
    return _spin_setting(sys, theta, sign, v / np.linalg.norm(v))


def cot_polynomial(theta: float) -> float:
    """cot^6(x) - 3 cot^4(x) - 3 cot^2(x) - 1 at x = theta/2."""
    u = 1.0 / math.tan(theta / 2) ** 2
    return u ** 3 - 3 * u ** 2 - 3 * u - 1


def solve_theta32() -> float:
    """The angle in (0, pi) at which the spin-3/2 state is normalized.

    Bisection on u = cot^2(theta/2) for u^3 - 3u^2 - 3u - 1 = 0, whose only
    positive root lies in (3, 4) (one sign change in the coefficients).
    """
    def f(u):
        return ((u - 3) * u - 3) * u - 1

    lo, hi = 3.0, 4.0
    assert f(lo) < 0 < f(hi)
    while hi - lo > 4 * np.finfo(float).eps * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    return 2.0 * math.atan(1.0 / math.sqrt(u))


def theta32_closed_form() -> float:
    """2 arccot(sqrt(1 + 2^(1/3) + 2^(2/3)))."""
    return 2.0 * math.atan(1.0 / math.sqrt(1 + 2 ** (1 / 3) + 2 ** (2 / 3)))


def general_theta_closed_form(s) -> float:
    """Angle at which |<Sz=+s|A2=+s>|^2 = cos^(4s)(theta/2) equals 1/2."""
    s = as_spin(s)
    return 2.0 * math.acos(2.0 ** (-1.0 / (4 * float(s))))


# -- general spin -------------------------------------------------------------

def _top_vectors(sys: SpinSystem, thetas: np.ndarray, sign: int) -> np.ndarray:
    """+s eigenvectors of the rotated observable for each theta (rows)."""
    Hs = (np.cos(thetas)[:, None, None] * sys.Sz
          + sign * np.sin(thetas)[:, None, None] * sys.Sx)
    specs = hermitian_eigen_batch(Hs)
    return np.array([sd.eigenvectors[:, -1] for sd in specs])


def _p4_from_top(v: np.ndarray) -> np.ndarray:
    """p4 for psi = normalized part of v orthogonal to the first basis vector.

    With c = |<e0|v>|: P[a2]psi = sqrt(1-c^2) v and P[b2] picks out e0, so
    p4 = c^2 (1 - c^2).
    """
    c2 = np.abs(v[..., 0]) ** 2
    return c2 * (1.0 - c2)


def _orthogonal_part(v: np.ndarray) -> np.ndarray:
    w = v.copy()
    w[0] = 0.0
    n = np.linalg.norm(w)
    if n == 0:
        raise HardyError("rotated eigenvector has no component orthogonal to |Sz=+s>")
    return w / n


def _golden_max(f, a: float, b: float, tol: float = GOLDEN_TOL) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _polish_half_weight(sys: SpinSystem, sign: int, theta: float, lo: float, hi: float) -> float:
    # p4 = q - q^2 with q = ||P[a2]psi||^2 is flat at its peak, so the golden
    # step only fixes q to ~1e-8; bisect q - 1/2 to sharpen the argmax.
    def excess(th):
        v = _top_vectors(sys, np.array([th]), sign)[0]
        return 0.5 - abs(v[0]) ** 2

    flo, fhi = excess(lo), excess(hi)
    if flo * fhi > 0:
        return theta
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = excess(mid)
        if fm == 0 or hi - lo < 1e-15:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class GeneralSpinResult:
    spin_setting: SpinSetting
    p4: float
    a2_weight: float
    eta: float
    structure_residual: float
    closed_form_theta: float

    @property
    def theta(self) -> float:
        return self.spin_setting.angle


def general_spin_setting(s, sign: int = +1, grid_points: int = GRID_POINTS) -> GeneralSpinResult:
    """Candidate optimal setting for spin ``s``.

    A1 = B2 = Sz, A2 = B1 = rotated observable, psi the normalized component of
    |A2=+s> orthogonal to |Sz=+s>.  The angle maximizes p4 by a grid scan
    followed by golden-section refinement.  The returned result also reports
    how closely P[a2]psi matches (psi + e^{i eta}|Sz=+s>)/2.
    """
    sys = spin_operators(s)
    thetas = np.linspace(0.0, math.pi, grid_points + 2)[1:-1]
    p4 = _p4_from_top(_top_vectors(sys, thetas, sign))
    k = int(np.argmax(p4))
    if not p4[k] > 0:
        raise HardyError(f"no angle with positive success probability found for s={sys.s}")
    step = thetas[1] - thetas[0]
    lo, hi = max(thetas[k] - step, 1e-12), min(thetas[k] + step, math.pi - 1e-12)

    def objective(th):
        return float(_p4_from_top(_top_vectors(sys, np.array([th]), sign))[0])

    theta = _golden_max(objective, lo, hi)
    theta = _polish_half_weight(sys, sign, theta, lo, hi)
    v = _top_vectors(sys, np.array([theta]), sign)[0]
    psi = _orthogonal_part(v)
    spin_set = _spin_setting(sys, theta, sign, psi)
    rep = spin_set.report()

    Pa2 = spin_set.setting.A2.projector.matrix
    half = Pa2 @ psi
    phi = sys.basis(sys.s)
    w = 2 * half - psi
    eta = float(np.angle(np.vdot(phi, w)))
    residual = float(np.linalg.norm(w - np.exp(1j * eta) * phi))
    return GeneralSpinResult(spin_set, rep.p4, float(np.vdot(half, half).real), eta,
                             residual, general_theta_closed_form(sys.s))
