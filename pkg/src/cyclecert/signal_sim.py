"""Switching signals from concatenable cycle sets, trajectory simulation, and
numerical verification of the exponential decay bound."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import Certificate
from .graph import CycleSet
from .linalg import InvalidInputError, SwitchedFamily
from .rearrange import basis_constant

POLICIES = ("roundrobin", "random")

# floating-point slack, relative to the bound, tolerated when checking decay;
# prefixes that define the basis constant sit exactly on the bound
_REL_SLACK = 1e-12


class TrajectoryOverflowError(RuntimeError):
    """A simulated state stopped being finite."""

    def __init__(self, step: int):
        super().__init__(f"state overflowed at step {step}")
        self.step = step


def build_signal(cycle_set: CycleSet, horizon: int, policy: str = "roundrobin",
                 seed: int | None = None) -> tuple:
    """sigma(0..horizon-1) built by concatenating full cycle traversals.

    roundrobin walks the cycles in stored order; random draws uniformly per
    concatenation from a seeded generator.  A singleton cycle set yields a
    periodic signal.
    """
    if cycle_set is None or not cycle_set.cycles:
        raise InvalidInputError("cannot build a signal from an empty cycle set")
    if policy not in POLICIES:
        raise InvalidInputError(f"unknown policy {policy!r}; pick one of {POLICIES}")
    if horizon < 0:
        raise InvalidInputError("horizon must be nonnegative")
    rng = np.random.default_rng(seed) if policy == "random" else None
    out: list[int] = []
    k = 0
    while len(out) < horizon:
        if rng is None:
            cyc = cycle_set.cycles[k % len(cycle_set.cycles)]
            k += 1
        else:
            cyc = cycle_set.cycles[int(rng.integers(len(cycle_set.cycles)))]
        out.extend(cyc)
    return tuple(out[:horizon])


@dataclass(frozen=True)
class SwitchingSignal:
    """Lazy signal generator tied to a cycle set and a scheduling policy."""

    cycle_set: CycleSet
    policy: str = "roundrobin"
    seed: int | None = None

    def sequence(self, horizon: int) -> tuple:
        return build_signal(self.cycle_set, horizon, policy=self.policy,
                            seed=self.seed)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States x(0..T) under a fixed signal; x(t+1) = A_sigma(t) x(t)."""

    x0: np.ndarray
    states: np.ndarray
    signal: tuple

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def simulate(family: SwitchedFamily, signal, x0,
             horizon: int | None = None) -> Trajectory:
    """Iterated multiplication along the signal, no normalization."""
    x = np.asarray(x0, dtype=float)
    if x.shape != (family.d,):
        raise InvalidInputError(
            f"initial state must have dimension {family.d}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("initial state must be finite")
    seq = tuple(signal)
    if horizon is None:
        horizon = len(seq)
    if horizon < 1:
        raise InvalidInputError("horizon must be at least 1")
    if len(seq) < horizon:
        raise InvalidInputError("signal shorter than requested horizon")
    states = np.empty((horizon + 1, family.d))
    states[0] = x
    for t in range(horizon):
        x = family.matrix(seq[t]) @ x
        if not np.all(np.isfinite(x)):
            raise TrajectoryOverflowError(t + 1)
        states[t + 1] = x
    return Trajectory(x0=states[0].copy(), states=states, signal=seq[:horizon])


@dataclass(frozen=True)
class GesReport:
    """Outcome of the randomized decay-bound check."""

    c_used: float
    gamma: float
    horizon: int
    trials: int
    policy: str
    seed: int
    max_violation_margin: float
    passed: bool


def verify_ges(family: SwitchedFamily, cert: Certificate, cycle_set: CycleSet,
               horizon: int = 1000, trials: int = 1000, seed: int = 0,
               policy: str = "roundrobin") -> GesReport:
    """Check ||x(t)|| <= c * e^(-gamma*t) * ||x0|| on random initial states.

    x0 is sampled uniformly per coordinate on [-10, 10]; c comes from the
    induction-basis enumeration over walk prefixes of length <= N*m.  The
    margin is the largest observed ||x(t)|| - bound; the check passes when it
    stays within floating-point slack of zero.
    """
    if trials < 1:
        raise InvalidInputError("need at least one trial")
    c = basis_constant(family, cycle_set, cert.gamma,
                       cert.n_subsystems * cert.m)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-10.0, 10.0, size=(trials, family.d))
    norms0 = np.linalg.norm(x, axis=1)
    seq = build_signal(cycle_set, horizon, policy=policy, seed=seed)
    worst = -math.inf
    passed = True
    for t, idx in enumerate(seq, start=1):
        x = x @ family.matrix(idx).T
        norms = np.linalg.norm(x, axis=1)
        bound = c * math.exp(-cert.gamma * t) * norms0
        margin = float(np.max(norms - bound))
        worst = max(worst, margin)
        if margin > _REL_SLACK * c * float(np.max(norms0, initial=0.0)):
            passed = False
    return GesReport(c_used=c, gamma=cert.gamma, horizon=horizon,
                     trials=trials, policy=policy, seed=seed,
                     max_violation_margin=worst, passed=passed)


def walk_prefix_margins(family: SwitchedFamily, cycle_set: CycleSet,
                        gamma: float, c: float, max_len: int,
                        policy: str = "roundrobin",
                        seed: int | None = None) -> np.ndarray:
    """Margins c*e^(-gamma*t) - ||A_sigma(t-1)...A_sigma(0)|| for t = 0..max_len
    along one policy-driven walk."""
    seq = build_signal(cycle_set, max_len, policy=policy, seed=seed)
    margins = np.empty(max_len + 1)
    product = np.eye(family.d)
    margins[0] = c - 1.0
    for t in range(1, max_len + 1):
        product = family.matrix(seq[t - 1]) @ product
        margins[t] = c * math.exp(-gamma * t) - float(
            np.linalg.norm(product, 2))
    return margins


def segment_signal(signal, start: int) -> tuple[list, tuple]:
    """Split a signal back into full cycle traversals beginning at `start`.

    Returns (complete segments, trailing partial segment).  Inverse of
    build_signal for inspection and round-trip checks.
    """
    seq = tuple(signal)
    if seq and seq[0] != start:
        raise InvalidInputError(f"signal does not begin at {start}")
    segments: list = []
    current: list = []
    for v in seq:
        if v == start and current:
            segments.append(tuple(current))
            current = [v]
        else:
            current.append(v)
    return segments, tuple(current)
