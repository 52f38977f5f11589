"""Fourier-basis truncations of the Dirac operator L = L0 + V.

The free operator i*diag(1,-1)*d/dx is diagonal in the exponential basis:
the vectors e1_n = (e^{-inx}, 0) and e2_n = (0, e^{inx}) both have
eigenvalue n.  Which n occur is set by the coupling of the endpoint values:

  per+  periodic      n even, both channels, eigenvalues doubly degenerate
  per-  antiperiodic  n odd, both channels, doubly degenerate
  dir   Dirichlet     every integer n, simple, eigenvector
                      g_n = (e1_n + e2_n)/sqrt(2)

A truncation keeps a symmetric window of lattice points.  K is sized so the
window's middle half (|n| <= K/2) is trusted: a disc there sees the boundary
of the truncation only through high-order coefficient chains.

The potential acts off-diagonally between the two channels for the periodic
couplings.  For the Dirichlet-type coupling, written in the g_n system, it
becomes the single Toeplitz-like family W(k + n).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .potential import (
    DIRICHLET,
    PER_MINUS,
    PER_PLUS,
    PotentialSpec,
    dirichlet_w,
    validate_bc,
)

EIGEN_RESIDUAL_TOL = 1e-8


class EigenResidualError(Exception):
    """Eigendecomposition failed its backward-error check."""


def lattice_points(bc: str, K: int) -> tuple[int, ...]:
    """Free-eigenvalue lattice kept by a size-K truncation, ascending."""
    validate_bc(bc)
    if K < 0:
        raise ValueError("K must be nonnegative")
    if bc == PER_PLUS:
        return tuple(range(-2 * K, 2 * K + 1, 2))
    if bc == PER_MINUS:
        return tuple(range(-2 * K - 1, 2 * K + 2, 2))
    return tuple(range(-K, K + 1))


def disc_centers(bc: str, limit: float) -> tuple[int, ...]:
    """Lattice points n with |n| <= limit, ascending (disc centers)."""
    validate_bc(bc)
    if bc == PER_PLUS:
        step, start = 2, 0
    elif bc == PER_MINUS:
        step, start = 2, 1
    else:
        step, start = 1, 0
    top = int(limit)
    pts = [n for n in range(start, top + 1, step) if abs(n) <= limit]
    return tuple(sorted(set([-n for n in pts] + pts)))


@dataclass(frozen=True)
class BasisIndexSet:
    """Ordered index set (n, channel) for one truncation.

    Channels are 1 and 2 for the periodic couplings (the two exponential
    channels) and 0 for the Dirichlet-type coupling (the combined g_n
    system).  Ordering: ascending n, lower channel first.
    """

    bc: str
    K: int
    indices: tuple[tuple[int, int], ...]
    _positions: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_positions", {idx: i for i, idx in enumerate(self.indices)})

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def lattice(self) -> tuple[int, ...]:
        return tuple(sorted({n for n, _ in self.indices}))

    @property
    def trusted_limit(self) -> float:
        return self.K / 2

    def position(self, n: int, channel: int) -> int:
        try:
            return self._positions[(n, channel)]
        except KeyError:
            raise KeyError(f"index (n={n}, channel={channel}) not in the {self.bc} truncation at K={self.K}") from None

    def free_diagonal(self) -> np.ndarray:
        return np.array([n for n, _ in self.indices], dtype=float)


def basis_index_set(bc: str, K: int) -> BasisIndexSet:
    validate_bc(bc)
    channels = (0,) if bc == DIRICHLET else (1, 2)
    indices = tuple((n, ch) for n in lattice_points(bc, K) for ch in channels)
    return BasisIndexSet(bc, K, indices)


@dataclass
class OperatorMatrix:
    """Dense truncation of an operator in a BasisIndexSet ordering.

    Carries a lazy eigendecomposition cache so repeated contour work on the
    same operator diagonalizes once.
    """

    basis: BasisIndexSet
    entries: np.ndarray
    _eig_cache: tuple | None = field(default=None, repr=False, compare=False)
    _aux_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"entries must be {self.basis.dim} x {self.basis.dim}")

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def is_diagonal(self) -> bool:
        off = self.entries - np.diag(np.diagonal(self.entries))
        return not np.any(off)

    @property
    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def build_free(bc: str, K: int) -> OperatorMatrix:
    basis = basis_index_set(bc, K)
    return OperatorMatrix(basis, np.diag(basis.free_diagonal().astype(complex)))


def build_v(spec: PotentialSpec, bc: str, K: int) -> OperatorMatrix:
    basis = basis_index_set(bc, K)
    ns = np.array(lattice_points(bc, K))
    dim = basis.dim
    entries = np.zeros((dim, dim), dtype=complex)
    if bc == DIRICHLET:
        # entry (k, n) couples g_n into g_k through W(k + n)
        for i, k in enumerate(ns):
            for j, n in enumerate(ns):
                w = dirichlet_w(spec, k + n)
                if w:
                    entries[i, j] = w
    else:
        # channel 1 feeds channel 2 through q, channel 2 feeds channel 1
        # through p; k + n is even on both periodic lattices
        for k in ns:
            row1 = basis.position(k, 1)
            row2 = basis.position(k, 2)
            for n in ns:
                qv = spec.q(k + n)
                if qv:
                    entries[row2, basis.position(n, 1)] = qv
                pv = spec.p(-k - n)
                if pv:
                    entries[row1, basis.position(n, 2)] = pv
    return OperatorMatrix(basis, entries)


def build_operator(spec: PotentialSpec, bc: str, K: int) -> OperatorMatrix:
    free = build_free(bc, K)
    return OperatorMatrix(free.basis, free.entries + build_v(spec, bc, K).entries)


def eigen(op: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the truncation, cached on the operator.

    Returns (values, vectors) with unit-norm columns sorted by (Re, Im).
    Raises EigenResidualError if any backward residual exceeds
    EIGEN_RESIDUAL_TOL times the operator's HS norm.
    """
    if op._eig_cache is None:
        if op.is_diagonal:
            vals = np.diagonal(op.entries).copy()
            order = np.lexsort((vals.imag, vals.real))
            vals = vals[order]
            vecs = np.eye(op.dim, dtype=complex)[:, order]
        else:
            vals, vecs = scipy.linalg.eig(op.entries)
            order = np.lexsort((vals.imag, vals.real))
            vals = vals[order]
            vecs = vecs[:, order]
            vecs = vecs / np.linalg.norm(vecs, axis=0)
        scale = max(op.hs_norm, 1.0)
        residual = np.linalg.norm(op.entries @ vecs - vecs * vals, axis=0).max()
        if residual > EIGEN_RESIDUAL_TOL * scale:
            raise EigenResidualError(
                f"eigendecomposition residual {residual:.3e} exceeds {EIGEN_RESIDUAL_TOL:.0e} * ||L|| = "
                f"{EIGEN_RESIDUAL_TOL * scale:.3e}"
            )
        op._eig_cache = (vals, vecs)
    return op._eig_cache


def eigenbasis_condition(op: OperatorMatrix) -> float:
    if "cond" not in op._aux_cache:
        _, vecs = eigen(op)
        op._aux_cache["cond"] = float(np.linalg.cond(vecs))
    return op._aux_cache["cond"]


def eigenbasis_inverse(op: OperatorMatrix) -> np.ndarray:
    if "vinv" not in op._aux_cache:
        _, vecs = eigen(op)
        op._aux_cache["vinv"] = np.linalg.inv(vecs)
    return op._aux_cache["vinv"]


@dataclass(frozen=True)
class BCClassification:
    regular: bool
    strictly_regular: bool
    roots: tuple[complex, complex]
    determinant: complex
    discriminant: complex


def classify_bc(a: complex, b: complex, c: complex, d: complex) -> BCClassification:
    """Classify a two-point coupling by its characteristic quadratic.

    The coupling is regular when bc - ad != 0 and strictly regular when in
    addition (b - c)^2 + 4ad != 0, i.e. when z^2 + (b+c)z + (bc - ad) has
    two distinct roots.
    """
    a, b, c, d = complex(a), complex(b), complex(c), complex(d)
    det = b * c - a * d
    disc = (b + c) ** 2 - 4 * det  # equals (b - c)^2 + 4ad
    root = np.sqrt(complex(disc))
    z1 = (-(b + c) - root) / 2
    z2 = (-(b + c) + root) / 2
    regular = det != 0
    strictly = regular and disc != 0
    return BCClassification(regular, strictly, (complex(z1), complex(z2)), det, disc)


def bc_quadruple(bc: str) -> tuple[complex, complex, complex, complex]:
    """Canonical (a, b, c, d) coupling coefficients for a named bc."""
    validate_bc(bc)
    if bc == PER_PLUS:
        return (0, -1, -1, 0)
    if bc == PER_MINUS:
        return (0, 1, 1, 0)
    return (-1, 0, 0, -1)
