"""Dense real matrix utilities for switched-system analysis.

Induced 2-norms, matrix commutators, Schur-stability classification and the
per-family contraction parameters (m, rho).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_K_MAX = 64
DEFAULT_M_MAX = 64

# spectral radius estimates above 1 + this margin count as definitely unstable
_UNSTABLE_MARGIN = 1e-9
# norms beyond this cannot recover below 1 without numerical nonsense
_NORM_BLOWUP = 1e150


class InvalidInputError(ValueError):
    """A matrix or family violates a structural precondition."""


class SearchExhaustedError(RuntimeError):
    """No power m <= m_max contracts every stable subsystem."""


class Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


def as_matrix(a) -> np.ndarray:
    """Validate and return a square float matrix with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix entries must be finite")
    return m


def spectral_norm(a) -> float:
    """Largest singular value of a square matrix (induced 2-norm)."""
    return float(np.linalg.norm(as_matrix(a), 2))


def spectral_norm_2x2(a) -> float:
    """Closed-form induced 2-norm of a 2x2 matrix.

    Solves the characteristic quadratic of A^T A directly; serves as an
    independent oracle for :func:`spectral_norm`.
    """
    m = as_matrix(a)
    if m.shape != (2, 2):
        raise InvalidInputError("closed form is only available for 2x2 matrices")
    b = m.T @ m
    tr = b[0, 0] + b[1, 1]
    det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
    disc = max(tr * tr - 4.0 * det, 0.0)
    return math.sqrt(max(0.5 * (tr + math.sqrt(disc)), 0.0))


def power_iteration_norm(a, tol: float = 1e-12, max_iter: int = 10_000,
                         seed: int = 0) -> float:
    """Induced 2-norm via power iteration on A^T A.

    Second independent route for :func:`spectral_norm`; accuracy degrades when
    the top two singular values nearly coincide, which is why the SVD route is
    the primary implementation.
    """
    m = as_matrix(a)
    b = m.T @ m
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(b.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = b @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        lam_new = float(v @ (b @ v))
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1e-300):
            lam = lam_new
            break
        lam = lam_new
    return math.sqrt(max(lam, 0.0))


def commutator(a, b) -> np.ndarray:
    """A@B - B@A for same-dimension square matrices."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise InvalidInputError(
            f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return ma @ mb - mb @ ma


def _dominant_eigenvalue(m: np.ndarray, tol: float = 1e-9,
                         max_iter: int = 10_000,
                         seed: int = 0) -> tuple[float, bool]:
    """Power-iteration estimate of the dominant eigenvalue of a square matrix.

    Returns (estimate, converged).  Does not converge when the dominant
    eigenvalue is complex or defective; callers must treat unconverged
    estimates as unusable.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0, True
        v = w / nw
        lam = float(v @ (m @ v))
        resid = float(np.linalg.norm(m @ v - lam * v))
        if resid <= tol * max(abs(lam), 1e-300):
            return lam, True
    return lam, False


def verify_schur(a, k_max: int = DEFAULT_K_MAX) -> Stability:
    """Classify a matrix as Schur stable / unstable by sufficient tests only.

    STABLE when some power has norm < 1 (sound: the spectral radius is at most
    ||A^k||^(1/k)).  UNSTABLE when |det| >= 1, or when a converged dominant
    eigenvalue estimate clears 1 by more than 1e-9.  A spectral radius of
    exactly 1 lands in the |det| test for volume-preserving matrices and is
    classified UNSTABLE; other boundary cases come back INCONCLUSIVE.
    """
    m = as_matrix(a)
    if abs(float(np.linalg.det(m))) >= 1.0:
        return Stability.UNSTABLE
    if k_max < 1:
        raise InvalidInputError("k_max must be positive")
    power = m
    for _ in range(k_max):
        nrm = spectral_norm(power)
        if nrm < 1.0:
            return Stability.STABLE
        if nrm > _NORM_BLOWUP:
            break
        power = power @ m
    lam, converged = _dominant_eigenvalue(m)
    if converged and abs(lam) > 1.0 + _UNSTABLE_MARGIN:
        return Stability.UNSTABLE
    return Stability.INCONCLUSIVE


@dataclass(frozen=True, eq=False)
class SwitchedFamily:
    """Subsystem matrices A_1..A_N, their stable/unstable split, and the set
    of admissible switches as ordered index pairs (self-loops allowed)."""

    matrices: tuple
    stable: frozenset
    unstable: frozenset
    edges: frozenset

    def __post_init__(self):
        mats = tuple(as_matrix(m) for m in self.matrices)
        if not mats:
            raise InvalidInputError("family needs at least one subsystem")
        d = mats[0].shape[0]
        if any(m.shape != (d, d) for m in mats):
            raise InvalidInputError("subsystem matrices must share one dimension")
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "stable", frozenset(int(i) for i in self.stable))
        object.__setattr__(self, "unstable", frozenset(int(i) for i in self.unstable))
        object.__setattr__(self, "edges",
                           frozenset((int(i), int(j)) for i, j in self.edges))
        idx = frozenset(range(1, len(mats) + 1))
        if self.stable | self.unstable != idx or self.stable & self.unstable:
            raise InvalidInputError("stable/unstable sets must partition {1..N}")
        for (i, j) in self.edges:
            if i not in idx or j not in idx:
                raise InvalidInputError(f"edge ({i},{j}) leaves the index set")

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def d(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def indices(self) -> frozenset:
        return frozenset(range(1, self.n + 1))

    def matrix(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.n:
            raise InvalidInputError(f"subsystem index {i} out of range 1..{self.n}")
        return self.matrices[i - 1]


def infer_partition(matrices, strict: bool = False,
                    k_max: int = DEFAULT_K_MAX) -> tuple[set, set]:
    """Split indices into (stable, unstable) via verify_schur.

    Strict mode refuses INCONCLUSIVE verdicts; lenient mode files them as
    unstable, which is conservative for certification.
    """
    stable, unstable = set(), set()
    for i, m in enumerate(matrices, start=1):
        verdict = verify_schur(m, k_max=k_max)
        if verdict is Stability.STABLE:
            stable.add(i)
        elif verdict is Stability.UNSTABLE:
            unstable.add(i)
        elif strict:
            raise InvalidInputError(
                f"subsystem {i}: Schur classification inconclusive (strict mode)")
        else:
            unstable.add(i)
    return stable, unstable


def validate_family(family: SwitchedFamily, strict: bool = False,
                    k_max: int = DEFAULT_K_MAX) -> None:
    """Check the declared partition against verify_schur.

    A definite contradiction always raises; INCONCLUSIVE raises only in strict
    mode.
    """
    for i in sorted(family.stable):
        verdict = verify_schur(family.matrix(i), k_max=k_max)
        if verdict is Stability.UNSTABLE:
            raise InvalidInputError(f"subsystem {i} declared stable but verifies unstable")
        if verdict is Stability.INCONCLUSIVE and strict:
            raise InvalidInputError(
                f"subsystem {i} declared stable but verification is inconclusive")
    for i in sorted(family.unstable):
        verdict = verify_schur(family.matrix(i), k_max=k_max)
        if verdict is Stability.STABLE:
            raise InvalidInputError(f"subsystem {i} declared unstable but verifies stable")
        if verdict is Stability.INCONCLUSIVE and strict:
            raise InvalidInputError(
                f"subsystem {i} declared unstable but verification is inconclusive")


def make_family(matrices, edges, stable=None, unstable=None,
                strict: bool = False, k_max: int = DEFAULT_K_MAX) -> SwitchedFamily:
    """Build and validate a family, inferring the partition when undeclared."""
    mats = [as_matrix(m) for m in matrices]
    idx = set(range(1, len(mats) + 1))
    if stable is None and unstable is None:
        stable, unstable = infer_partition(mats, strict=strict, k_max=k_max)
    elif stable is None:
        stable = idx - set(unstable)
    elif unstable is None:
        unstable = idx - set(stable)
    family = SwitchedFamily(tuple(mats), frozenset(stable), frozenset(unstable),
                            frozenset(tuple(e) for e in edges))
    validate_family(family, strict=strict, k_max=k_max)
    return family


def family_norm_bound(family: SwitchedFamily) -> float:
    """max_i ||A_i|| over the whole family."""
    return max(spectral_norm(m) for m in family.matrices)


def find_m_rho(family: SwitchedFamily,
               m_max: int = DEFAULT_M_MAX) -> tuple[int, float]:
    """Smallest m with max_{i stable} ||A_i^m|| < 1, and that max as rho."""
    if not family.stable:
        raise InvalidInputError("family has no stable subsystems")
    if m_max < 1:
        raise InvalidInputError("m_max must be positive")
    powers = {i: family.matrix(i) for i in family.stable}
    for m in range(1, m_max + 1):
        worst = max(spectral_norm(p) for p in powers.values())
        if worst < 1.0:
            return m, worst
        powers = {i: p @ family.matrix(i) for i, p in powers.items()}
    raise SearchExhaustedError(
        f"no m <= {m_max} contracts every stable subsystem")
