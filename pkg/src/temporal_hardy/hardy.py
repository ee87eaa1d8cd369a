"""The four two-time Hardy probabilities and the case analysis built on them.

Every observable is reduced to a dichotomy: its designated outcome versus
everything else.  A :class:`MeasurementSetting` therefore only ever needs the
four designated-outcome projectors and their complements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .qcore import (
    DEFAULT_CLUSTER_TOL,
    Projector,
    as_cmatrix,
    as_state,
    born_prob,
    complement,
    hermitian_eigen,
    min_eigenvalue,
    projector_for_outcome,
    raw_sequential_prob,
)

DEFAULT_ZERO_TOL = 1e-10
DEFAULT_P4_MIN = 1e-6
HARDY_BOUND = 0.25


class HardyError(ValueError):
    """A Hardy-specific precondition failed."""


class ChainNotApplicable(HardyError):
    """The premises of a refutation chain are not met by the input."""


class BoundViolation(AssertionError):
    """A success probability above 1/4 (plus slack) was observed."""


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian matrix with a designated outcome."""

    matrix: np.ndarray
    outcome: float
    name: str = "observable"
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    def __post_init__(self):
        H = as_cmatrix(self.matrix, self.name)
        scale = max(1.0, float(np.linalg.norm(H)))
        if np.linalg.norm(H - H.conj().T) > 1e-10 * scale:
            raise HardyError(f"{self.name}: matrix is not Hermitian")
        H.setflags(write=False)
        object.__setattr__(self, "matrix", H)
        object.__setattr__(self, "outcome", float(self.outcome))
        # raises if the outcome is not in the spectrum
        try:
            self.projector
        except ValueError as exc:
            raise HardyError(f"{self.name}: {exc}") from None

    @classmethod
    def dichotomic(cls, projector: Projector, name: str = "observable",
                   designated: float = 1.0, other: float = -1.0) -> Observable:
        """Observable with value ``designated`` on the projector's image and ``other`` elsewhere."""
        P = projector.matrix
        H = designated * P + other * (np.eye(projector.dim) - P)
        return cls(H, designated, name)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self):
        return hermitian_eigen(self.matrix, self.cluster_tol)

    @cached_property
    def projector(self) -> Projector:
        return projector_for_outcome(self.spectrum, self.outcome, self.cluster_tol)

    @cached_property
    def not_projector(self) -> Projector:
        return complement(self.projector)


@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    """Observables A1, A2 (first time) and B1, B2 (second time)."""

    A1: Observable
    A2: Observable
    B1: Observable
    B2: Observable

    def __post_init__(self):
        dims = {o.dim for o in (self.A1, self.A2, self.B1, self.B2)}
        if len(dims) != 1:
            raise HardyError(f"observables have mismatched dimensions {sorted(dims)}")

    @classmethod
    def from_matrices(cls, A1, a1, A2, a2, B1, b1, B2, b2,
                      cluster_tol: float = DEFAULT_CLUSTER_TOL) -> MeasurementSetting:
        return cls(Observable(A1, a1, "A1", cluster_tol), Observable(A2, a2, "A2", cluster_tol),
                   Observable(B1, b1, "B1", cluster_tol), Observable(B2, b2, "B2", cluster_tol))

    @classmethod
    def from_projectors(cls, a1: Projector, a2: Projector, b1: Projector,
                        b2: Projector) -> MeasurementSetting:
        """Dichotomic +1/-1 observables whose +1 eigenspaces are the given projectors."""
        return cls(Observable.dichotomic(a1, "A1"), Observable.dichotomic(a2, "A2"),
                   Observable.dichotomic(b1, "B1"), Observable.dichotomic(b2, "B2"))

    @property
    def dim(self) -> int:
        return self.A1.dim

    def observables(self) -> dict[str, Observable]:
        return {"A1": self.A1, "A2": self.A2, "B1": self.B1, "B2": self.B2}

    def projectors(self) -> dict[str, Projector]:
        """Named designated projectors and complements (``"~a1"`` is I - P[a1])."""
        out = {}
        for key, obs in (("a1", self.A1), ("a2", self.A2), ("b1", self.B1), ("b2", self.B2)):
            out[key] = obs.projector
            out["~" + key] = obs.not_projector
        return out


def _state_for(setting: MeasurementSetting, psi) -> np.ndarray:
    return as_state(psi, setting.dim)


@dataclass(frozen=True)
class HardyReport:
    p1: float
    p2: float
    p3: float
    p4: float
    raw: tuple[float, float, float, float]
    zero_flags: tuple[bool, bool, bool]
    success: bool
    zero_tol: float
    p4_min: float

    @property
    def probabilities(self) -> tuple[float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4)

    @property
    def residuals(self) -> tuple[float, float, float]:
        """Vector norms ||P_second P_first psi|| of the three zero conditions."""
        return tuple(math.sqrt(max(r, 0.0)) for r in self.raw[:3])

    def as_dict(self) -> dict:
        return {
            "p": list(self.probabilities),
            "raw": list(self.raw),
            "residuals": list(self.residuals),
            "zero_flags": list(self.zero_flags),
            "success": self.success,
            "zero_tol": self.zero_tol,
            "p4_min": self.p4_min,
        }


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def evaluate(setting: MeasurementSetting, psi, zero_tol: float = DEFAULT_ZERO_TOL,
             p4_min: float = DEFAULT_P4_MIN) -> HardyReport:
    """Compute the four Hardy probabilities for ``psi`` under ``setting``.

    p1 = prob(A1=a1, B1=b1), p2 = prob(A1=~a1, B2=b2),
    p3 = prob(A2=a2, B1=~b1), p4 = prob(A2=a2, B2=b2).
    The zero conditions hold when the corresponding probability is at most
    ``zero_tol``; success additionally needs ``p4 > p4_min``.
    """
    psi = _state_for(setting, psi)
    P = setting.projectors()
    raw = (
        raw_sequential_prob(psi, P["a1"], P["b1"]),
        raw_sequential_prob(psi, P["~a1"], P["b2"]),
        raw_sequential_prob(psi, P["a2"], P["~b1"]),
        raw_sequential_prob(psi, P["a2"], P["b2"]),
    )
    p = tuple(_clamp(r) for r in raw)
    flags = tuple(r <= zero_tol for r in raw[:3])
    success = all(flags) and p[3] > p4_min
    return HardyReport(*p, raw=raw, zero_flags=flags, success=success,
                       zero_tol=zero_tol, p4_min=p4_min)


# -- condition sets ---------------------------------------------------------

def _residuals(setting: MeasurementSetting, psi: np.ndarray) -> dict[str, float]:
    P = {k: v.matrix for k, v in setting.projectors().items()}
    a1psi = P["a1"] @ psi
    na1psi = P["~a1"] @ psi
    a2psi = P["a2"] @ psi
    b2a2 = P["b2"] @ a2psi
    return {
        "P[a1]psi": float(np.linalg.norm(a1psi)),
        "P[~a1]psi": float(np.linalg.norm(na1psi)),
        "P[b1]P[a1]psi": float(np.linalg.norm(P["b1"] @ a1psi)),
        "P[b2]P[~a1]psi": float(np.linalg.norm(P["b2"] @ na1psi)),
        "P[~b1]P[a2]psi": float(np.linalg.norm(P["~b1"] @ a2psi)),
        "p4": float(np.vdot(b2a2, b2a2).real),
    }


# (residual key, wanted) where wanted=True means "residual vanishes" and
# False means "residual is nonzero" (the branch not already covered by set 1/2).
CONDITION_SETS: dict[int, tuple[tuple[str, bool], ...]] = {
    1: (("P[a1]psi", True), ("P[~a1]psi", True), ("P[~b1]P[a2]psi", True)),
    2: (("P[a1]psi", True), ("P[b2]P[~a1]psi", True), ("P[~b1]P[a2]psi", True)),
    3: (("P[a1]psi", False), ("P[b1]P[a1]psi", True), ("P[~a1]psi", True),
        ("P[~b1]P[a2]psi", True)),
    4: (("P[a1]psi", False), ("P[b1]P[a1]psi", True), ("P[~a1]psi", False),
        ("P[b2]P[~a1]psi", True), ("P[~b1]P[a2]psi", True)),
}


@dataclass(frozen=True)
class ConditionSetClassification:
    conditions: dict[int, tuple[tuple[str, bool], ...]]
    residuals: dict[str, float]
    satisfied_sets: frozenset[int]
    tol: float
    p4_min: float

    def as_dict(self) -> dict:
        return {
            "conditions": {str(k): [{"condition": name, "holds": ok} for name, ok in v]
                           for k, v in self.conditions.items()},
            "residuals": self.residuals,
            "satisfied_sets": sorted(self.satisfied_sets),
            "tol": self.tol,
            "p4_min": self.p4_min,
        }


def classify_condition_sets(setting: MeasurementSetting, psi,
                            tol: float = math.sqrt(DEFAULT_ZERO_TOL),
                            p4_min: float = DEFAULT_P4_MIN) -> ConditionSetClassification:
    """Report which of the four exhaustive condition sets ``psi`` realizes.

    Vanishing conditions are vector residuals ``<= tol``.  The sets are read as
    a partition of the branches: sets 3 and 4 only take the
    ``P[b1]P[a1]psi = 0`` branch when ``P[a1]psi`` itself is nonzero, and set 4
    only takes ``P[b2]P[~a1]psi = 0`` when ``P[~a1]psi`` is nonzero.
    """
    psi = _state_for(setting, psi)
    res = _residuals(setting, psi)
    conditions = {}
    satisfied = set()
    for k, spec in CONDITION_SETS.items():
        flags = [(f"{key}={'0' if zero else '!0'}", (res[key] <= tol) == zero)
                 for key, zero in spec]
        flags.append(("p4>p4_min", res["p4"] > p4_min))
        conditions[k] = tuple(flags)
        if all(ok for _, ok in flags):
            satisfied.add(k)
    return ConditionSetClassification(conditions, res, frozenset(satisfied), tol, p4_min)


# -- refutation of sets 3 and 4 ----------------------------------------------

@dataclass(frozen=True)
class OrderLink:
    lower: str
    upper: str
    min_eigenvalue: float
    holds: bool


@dataclass(frozen=True)
class RefutationCertificate:
    set_id: int
    links: tuple[OrderLink, ...]
    conclusion: str
    value: float
    holds: bool

    def as_dict(self) -> dict:
        return {
            "set_id": self.set_id,
            "links": [{"lower": l.lower, "upper": l.upper,
                       "min_eigenvalue": l.min_eigenvalue, "holds": l.holds} for l in self.links],
            "conclusion": self.conclusion,
            "value": self.value,
            "holds": self.holds,
        }


# Loewner chains: each premise-derived link, then the transitive consequences.
_CHAINS = {
    3: (("a1", "~b1"), ("b1", "~a1"), ("a2", "b1"), ("a2", "~a1")),
    4: (("a1", "~b1"), ("b1", "~a1"), ("~a1", "~b2"), ("b1", "~b2"), ("a2", "b1"),
        ("a2", "~b2")),
}
_PREMISES = {
    3: ("P[b1]P[a1]psi", "P[~a1]psi", "P[~b1]P[a2]psi"),
    4: ("P[b1]P[a1]psi", "P[b2]P[~a1]psi", "P[~b1]P[a2]psi"),
}


def refute_condition_set(setting: MeasurementSetting, psi, set_id: int,
                         tol: float = 1e-10) -> RefutationCertificate:
    """Check the operator-order chain that rules out condition set 3 or 4.

    Set 3 ends in ``<psi|P[a2]|psi> <= tol``; set 4 in ``p4 <= tol``.  Raises
    :class:`ChainNotApplicable` if the vector premises fail, or if any link of
    the chain is not a valid Loewner inequality for these projectors.
    """
    if set_id not in _CHAINS:
        raise HardyError(f"set_id must be 3 or 4, got {set_id!r}")
    psi = _state_for(setting, psi)
    res = _residuals(setting, psi)
    bad = [k for k in _PREMISES[set_id] if res[k] > tol]
    if bad:
        raise ChainNotApplicable(f"set {set_id} premises fail: {', '.join(bad)}")
    P = setting.projectors()
    links = []
    for lo, hi in _CHAINS[set_id]:
        lam = min_eigenvalue(P[hi].matrix - P[lo].matrix)
        links.append(OrderLink(f"P[{lo}]", f"P[{hi}]", lam, lam >= -tol))
    broken = [f"{l.lower} <= {l.upper} (min eig {l.min_eigenvalue:.3e})"
              for l in links if not l.holds]
    if broken:
        raise ChainNotApplicable(f"set {set_id} chain link fails: {'; '.join(broken)}")
    if set_id == 3:
        conclusion, value = "<psi|P[a2]|psi>", born_prob(psi, P["a2"])
    else:
        conclusion, value = "p4", res["p4"]
    return RefutationCertificate(set_id, tuple(links), conclusion, value, value <= tol)


# -- the 1/4 bound -----------------------------------------------------------

def bound_slack(zero_tol: float) -> float:
    return 10.0 * math.sqrt(zero_tol)


@dataclass(frozen=True)
class BoundCheck:
    p4: float
    bound: float
    slack: float
    holds: bool
    born_a2: float | None
    distance_from_half: float | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def check_bound(report: HardyReport, born_a2: float | None = None) -> BoundCheck:
    """Compare ``report.p4`` against 1/4 + slack; the zeros must hold."""
    if not all(report.zero_flags):
        raise HardyError("zero conditions do not hold; the 1/4 bound does not apply")
    slack = bound_slack(report.zero_tol)
    return BoundCheck(
        p4=report.p4,
        bound=HARDY_BOUND,
        slack=slack,
        holds=report.p4 <= HARDY_BOUND + slack,
        born_a2=born_a2,
        distance_from_half=None if born_a2 is None else abs(born_a2 - 0.5),
    )


def verify_bound(setting: MeasurementSetting, psi,
                 zero_tol: float = DEFAULT_ZERO_TOL) -> BoundCheck:
    psi = _state_for(setting, psi)
    report = evaluate(setting, psi, zero_tol)
    return check_bound(report, born_prob(psi, setting.A2.projector))


# -- mixtures -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Ensemble:
    weights: tuple[float, ...]
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(self.states) or not w:
            raise HardyError("weights and states must be non-empty and of equal length")
        if min(w) < 0 or abs(sum(w) - 1.0) > 1e-12:
            raise HardyError("weights must be nonnegative and sum to 1")
        states = tuple(as_state(s, name=f"state {k}") for k, s in enumerate(self.states))
        if len({s.shape[0] for s in states}) != 1:
            raise HardyError("ensemble states have mixed dimensions")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)


def mixed_success(setting: MeasurementSetting, ens: Ensemble,
                  zero_tol: float = DEFAULT_ZERO_TOL) -> float:
    """Success probability of a mixture: the weighted sum of member p4 values."""
    total = 0.0
    for k, (w, psi) in enumerate(zip(ens.weights, ens.states)):
        rep = evaluate(setting, psi, zero_tol)
        if not all(rep.zero_flags):
            raise HardyError(f"ensemble member {k} violates a zero condition: {rep.raw[:3]}")
        total += w * rep.p4
    if total > HARDY_BOUND + bound_slack(zero_tol):
        raise BoundViolation(f"mixture success {total} exceeds 1/4")
    return total
