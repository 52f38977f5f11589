"""Shifted solves (lambda - L)^{-1} and the Hilbert-Schmidt smallness test.

Two independent routes to the same quantity live here on purpose.  resolve()
actually factors the shifted truncation and solves, and is what the contour
quadrature consumes.  kvk_hs_norm() never touches a matrix: it evaluates the
lattice double sum

    ||K V K||_HS^2 = sum_{i,k} w(i + k) / (|lambda - i| |lambda - k|)

by grouping terms along anti-diagonals j = i + k, where w(j) collects the
squared potential coefficients that can connect modes i and k.  K here is
the diagonal square root of the free resolvent, taken with the principal
branch cut just below the negative real axis so that K^2 reproduces the
free resolvent exactly.

The smallness test drives everything else: once the circle of radius 1/2
around a lattice point n has max ||K V K||_HS <= 1/2, the resolvent exists
on that circle and the Riesz projection for the disc is trustworthy.
find_threshold_n scans the trusted window for the smallest cutoff N beyond
which every disc passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .operator import OperatorMatrix, BasisIndexSet, disc_centers, eigen, lattice_points
from .potential import DIRICHLET, PotentialSpec, dirichlet_w, r_sequence, validate_bc

CONDITION_LIMIT = 1e12


class IllConditionedError(Exception):
    """Shifted system too close to singular to solve reliably."""


class ThresholdNotFoundError(Exception):
    """No cutoff within the trusted window satisfies the smallness test."""


def branch_sqrt(z):
    """Principal square root with the argument taken in [-pi, pi).

    Differs from the numpy convention only on the negative real axis, which
    gets argument -pi (so its square root sits on the negative imaginary
    axis).  Accepts scalars or arrays.
    """
    z = np.asarray(z, dtype=complex)
    phi = np.angle(z)
    phi = np.where(phi == np.pi, -np.pi, phi)
    out = np.sqrt(np.abs(z)) * np.exp(0.5j * phi)
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class KOperator:
    """Diagonal square root of the free resolvent on one truncation."""

    basis: BasisIndexSet
    lam: complex
    diag: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.diag)


def k_operator(basis: BasisIndexSet, lam: complex) -> KOperator:
    lam = complex(lam)
    free = basis.free_diagonal()
    gaps = lam - free
    if np.any(gaps == 0):
        raise ValueError(f"lambda = {lam} is a free eigenvalue of the {basis.bc} truncation")
    return KOperator(basis, lam, 1.0 / branch_sqrt(gaps))


@dataclass
class ShiftedSolve:
    """LU factorization of (lambda - L) with a cheap conditioning gate.

    The gate runs one inverse-power step from a fixed start vector; the
    resulting estimate of ||A||_1 * ||A^{-1}|| must stay below
    CONDITION_LIMIT or the solve refuses, naming the nearest eigenvalue.
    """

    op: OperatorMatrix
    lam: complex
    _lu: tuple = field(repr=False, default=None)
    condition_estimate: float = 0.0

    def __post_init__(self) -> None:
        self.lam = complex(self.lam)
        shifted = self.lam * np.eye(self.op.dim) - self.op.entries
        try:
            self._lu = scipy.linalg.lu_factor(shifted)
            probe = np.full(self.op.dim, 1.0 / np.sqrt(self.op.dim), dtype=complex)
            grown = scipy.linalg.lu_solve(self._lu, probe)
            inv_norm = float(np.linalg.norm(grown))
            self.condition_estimate = inv_norm * float(np.abs(shifted).sum(axis=0).max())
        except (scipy.linalg.LinAlgError, ValueError):
            self.condition_estimate = np.inf
        if not np.isfinite(self.condition_estimate) or self.condition_estimate > CONDITION_LIMIT:
            vals, _ = eigen(self.op)
            nearest = vals[np.argmin(np.abs(vals - self.lam))]
            raise IllConditionedError(
                f"(lambda - L) at lambda = {self.lam} has condition estimate "
                f"{self.condition_estimate:.3e} > {CONDITION_LIMIT:.0e}; "
                f"nearest eigenvalue is {nearest}"
            )

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=complex)
        return scipy.linalg.lu_solve(self._lu, rhs)


def shifted_solve(op: OperatorMatrix, lam: complex) -> ShiftedSolve:
    return ShiftedSolve(op, lam)


def resolve(op: OperatorMatrix, lam: complex, rhs: np.ndarray) -> np.ndarray:
    """Apply (lambda - L)^{-1} to one vector or a stack of columns."""
    return shifted_solve(op, lam).solve(rhs)


def _antidiagonal_weights(spec: PotentialSpec, bc: str) -> dict[int, float]:
    """w(j) = squared coefficient mass coupling mode pairs with i + k = j."""
    if bc == DIRICHLET:
        return {
            j: abs(dirichlet_w(spec, j)) ** 2
            for j in range(-spec.max_mode, spec.max_mode + 1)
        }
    top = spec.max_mode - (spec.max_mode % 2)
    return {
        j: abs(spec.q(j)) ** 2 + abs(spec.p(-j)) ** 2
        for j in range(-top, top + 1, 2)
    }


def _lattice_double_sum(weights: dict[int, float], lat: np.ndarray, lam: complex) -> float:
    gaps = np.abs(lam - lat)
    if np.any(gaps == 0):
        raise ValueError(f"lambda = {lam} lies on the free lattice")
    inv = 1.0 / gaps
    lo, hi = int(lat[0]), int(lat[-1])
    total = 0.0
    # partners j - i stay on the lattice automatically: j carries
    # coefficient mass only when it has the right parity
    for j, w in weights.items():
        if w == 0.0:
            continue
        partners = j - lat
        mask = (partners >= lo) & (partners <= hi)
        if not np.any(mask):
            continue
        inv_partner = 1.0 / np.abs(lam - partners[mask])
        total += w * float(np.dot(inv[mask], inv_partner))
    return total


def kvk_hs_norm(spec: PotentialSpec, bc: str, lam: complex, K: int) -> float:
    """HS norm of K V K on the size-K truncation, by lattice sums alone."""
    validate_bc(bc)
    lat = np.array(lattice_points(bc, K), dtype=float)
    return float(np.sqrt(_lattice_double_sum(_antidiagonal_weights(spec, bc), lat, complex(lam))))


def dominated_hs_norm(spec: PotentialSpec, bc: str, lam: complex, K: int) -> float:
    """Same double sum with the dominating envelope r in place of p, q.

    Always >= kvk_hs_norm for the same arguments, since
    r(j)^2 >= |q(j)|^2 + |p(-j)|^2 pointwise.
    """
    validate_bc(bc)
    r = r_sequence(spec, bc)
    weights = {j: v * v for j, v in r.values.items()}
    lat = np.array(lattice_points(bc, K), dtype=float)
    return float(np.sqrt(_lattice_double_sum(weights, lat, complex(lam))))


def circle_samples(center: complex, radius: float, count: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(count) / count
    return center + radius * np.exp(1j * theta)


def circle_norm_profile(
    spec: PotentialSpec, bc: str, K: int, samples_per_circle: int = 16
) -> dict[int, float]:
    """Worst sampled ||K V K||_HS on the radius-1/2 circle of each disc.

    Covers every nonzero lattice point in the trusted window |n| <= K/2.
    """
    if samples_per_circle < 4:
        raise ValueError("samples_per_circle must be at least 4")
    profile: dict[int, float] = {}
    for n in disc_centers(bc, K / 2):
        if n == 0:
            continue
        worst = 0.0
        for lam in circle_samples(n, 0.5, samples_per_circle):
            worst = max(worst, kvk_hs_norm(spec, bc, lam, K))
        profile[n] = worst
    return profile


def find_threshold_n(spec: PotentialSpec, bc: str, K: int, samples_per_circle: int = 16) -> int:
    """Smallest cutoff N <= K/2 with max ||K V K||_HS <= 1/2 past it.

    The zero potential returns 1.  Raises ThresholdNotFoundError when even
    the outermost trusted disc fails the smallness test, i.e. no cutoff
    inside the truncation leaves a nonempty verified window.
    """
    profile = circle_norm_profile(spec, bc, K, samples_per_circle)
    failing = [abs(n) for n, worst in profile.items() if worst > 0.5]
    if not failing:
        return 1
    N = max(failing)
    window = [n for n in profile if abs(n) > N]
    if not window:
        raise ThresholdNotFoundError(
            f"no threshold within truncation: disc at |n| = {N} still has "
            f"max sampled ||K V K||_HS > 1/2 at the edge of the trusted window (K = {K})"
        )
    return N
