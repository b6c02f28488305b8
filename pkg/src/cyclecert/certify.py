"""Commutator-based stability certificates for switched linear systems.

The certified inequality is

    rho*e^(gamma*m) + (N-1) * m(m+1)/2 * M^(N*m-2) * eps_p * e^(gamma*N*m) <= 1

where rho contracts the m-th powers of the stable subsystems, M bounds every
subsystem norm, and eps_p bounds the commutator norms against the anchor p.
A stable anchor p satisfying it, together with a nonempty concatenable set of
cycles through p, certifies global exponential stability of every switching
signal built by concatenating those cycles.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .graph import CycleSet, build_digraph, enumerate_cycles_through, group_concatenable
from .linalg import (
    DEFAULT_M_MAX,
    InvalidInputError,
    SwitchedFamily,
    commutator,
    family_norm_bound,
    find_m_rho,
    spectral_norm,
)


class InfeasibleGammaError(ValueError):
    """A user-supplied gamma violates rho*e^(gamma*m) < 1."""


class InfeasibleParameterError(ValueError):
    """Certificate parameters admit no epsilon bound."""


class NoStableSubsystemError(RuntimeError):
    """The family has no Schur-stable subsystem to anchor a certificate."""


@dataclass(frozen=True)
class Certificate:
    """Witness for the certified inequality; valid iff lhs <= 1."""

    p: int
    m: int
    rho: float
    gamma: float
    eps: float
    norm_bound: float
    n_subsystems: int
    lhs: float

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise InvalidInputError("rho must lie in [0, 1)")
        if self.gamma <= 0.0:
            raise InvalidInputError("gamma must be positive")
        if self.eps < 0.0:
            raise InvalidInputError("eps must be nonnegative")
        if self.rho * math.exp(self.gamma * self.m) >= 1.0:
            raise InvalidInputError("rho*e^(gamma*m) must stay below 1")
        expected = theorem_lhs(rho=self.rho, gamma=self.gamma, m=self.m,
                               n=self.n_subsystems, norm_bound=self.norm_bound,
                               eps=self.eps)
        if abs(self.lhs - expected) > 1e-12 * max(abs(expected), 1.0):
            raise InvalidInputError("lhs field inconsistent with its parameters")

    @property
    def valid(self) -> bool:
        return self.lhs <= 1.0


@dataclass(frozen=True)
class Algorithm1Result:
    """Outcome of the anchor-detection sweep."""

    certificate: Certificate | None
    cycle_set: CycleSet | None
    reason: str | None
    warnings: tuple

    @property
    def found(self) -> bool:
        return self.certificate is not None and self.cycle_set is not None


def choose_gamma(m: int, rho: float, theta: float = 0.5,
                 gamma: float | None = None) -> float:
    """Decay rate gamma with rho*e^(gamma*m) < 1.

    An explicit gamma is accepted after a feasibility check; otherwise
    gamma = theta*(-ln rho)/m, which gives rho*e^(gamma*m) = rho^(1-theta).
    """
    if m < 1:
        raise InvalidInputError("m must be positive")
    if gamma is not None:
        if gamma <= 0.0:
            raise InfeasibleGammaError("gamma must be positive")
        if rho * math.exp(gamma * m) >= 1.0:
            raise InfeasibleGammaError(
                f"gamma={gamma} gives rho*e^(gamma*m) = "
                f"{rho * math.exp(gamma * m):.6g} >= 1")
        return float(gamma)
    if not 0.0 < rho < 1.0:
        raise InvalidInputError(
            "automatic gamma selection needs rho in (0, 1); pass gamma explicitly")
    if not 0.0 < theta < 1.0:
        raise InvalidInputError("theta must lie in (0, 1)")
    return theta * (-math.log(rho)) / m


def epsilon_p(family: SwitchedFamily, p: int) -> float:
    """Tightest commutator bound max_{i != p} ||A_p A_i - A_i A_p||."""
    if p not in family.stable:
        raise InvalidInputError(f"anchor {p} is not a stable subsystem index")
    others = [i for i in family.indices if i != p]
    if not others:
        warnings.warn("single-subsystem family: commutator bound is vacuous",
                      stacklevel=2)
        return 0.0
    ap = family.matrix(p)
    return max(spectral_norm(commutator(ap, family.matrix(i))) for i in others)


def theorem_lhs(*, rho: float, gamma: float, m: int, n: int,
                norm_bound: float, eps: float) -> float:
    """Left-hand side of the certified inequality.

    With eps == 0 (or a single subsystem) the commutator term vanishes and the
    value is exactly rho*e^(gamma*m).  Overflow comes back as +inf, which can
    never certify.
    """
    first = rho * math.exp(gamma * m)
    if eps == 0.0 or n <= 1:
        return first
    try:
        term = ((n - 1) * (m * (m + 1) / 2.0)
                * norm_bound ** (n * m - 2)
                * eps * math.exp(gamma * n * m))
    except OverflowError:
        return math.inf
    return first + term


def epsilon_bound(n: int, m: int, norm_bound: float, rho: float,
                  gamma: float) -> float:
    """Largest eps for which the certified inequality still holds.

    Back-substituting the result makes the inequality an equality.
    """
    if n < 2:
        raise InvalidInputError("epsilon bound needs at least two subsystems")
    first = rho * math.exp(gamma * m)
    if first >= 1.0:
        raise InfeasibleParameterError(
            f"rho*e^(gamma*m) = {first:.6g} >= 1: no eps can certify")
    try:
        denom = ((n - 1) * (m * (m + 1) / 2.0)
                 * norm_bound ** (n * m - 2)
                 * math.exp(gamma * n * m))
    except OverflowError:
        return 0.0
    return (1.0 - first) / denom


def run_algorithm1(family: SwitchedFamily, *, gamma: float | None = None,
                   theta: float = 0.5, rho: float | None = None,
                   m_max: int = DEFAULT_M_MAX) -> Algorithm1Result:
    """Sweep stable anchors in ascending index order; return the first one
    whose certificate inequality holds and whose concatenable cycle set is
    nonempty."""
    notes: list[str] = []
    if not family.stable:
        raise NoStableSubsystemError("family has no stable subsystem")
    m, rho_computed = find_m_rho(family, m_max=m_max)
    if rho is None:
        rho = rho_computed
    else:
        if not rho_computed <= rho < 1.0:
            raise InvalidInputError(
                f"rho override {rho} must lie in [{rho_computed:.6g}, 1)")
        notes.append(f"rho overridden to {rho} (computed {rho_computed:.6g})")
    gamma = choose_gamma(m, rho, theta=theta, gamma=gamma)
    norm_bound = family_norm_bound(family)
    n = family.n
    digraph = build_digraph(family)
    reasons: list[str] = []
    for p in sorted(family.stable):
        if n == 1:
            eps = 0.0
        else:
            eps = epsilon_p(family, p)
        lhs = theorem_lhs(rho=rho, gamma=gamma, m=m, n=n,
                          norm_bound=norm_bound, eps=eps)
        if lhs > 1.0:
            reasons.append(f"p={p}: lhs {lhs:.6g} > 1")
            continue
        cycles = enumerate_cycles_through(digraph, p)
        cycle_set = group_concatenable(cycles, p)
        if cycle_set is None:
            reasons.append(f"p={p}: C_p empty")
            continue
        cert = Certificate(p=p, m=m, rho=rho, gamma=gamma, eps=eps,
                           norm_bound=norm_bound, n_subsystems=n, lhs=lhs)
        return Algorithm1Result(certificate=cert, cycle_set=cycle_set,
                                reason=None, warnings=tuple(notes))
    return Algorithm1Result(certificate=None, cycle_set=None,
                            reason="; ".join(reasons) or "no stable anchor checked",
                            warnings=tuple(notes))
