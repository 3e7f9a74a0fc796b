"""Rank-revealing subspace arithmetic over C^m.

A :class:`Subspace` is stored as an m x d matrix whose columns form an
orthonormal basis.  Every rank decision in the package goes through
:func:`numerical_rank`, so the whole library shares one tolerance policy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import AmbientMismatchError, NumericalError

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "Subspace",
    "Inclusion",
    "Comparison",
    "numerical_rank",
    "orthonormalize",
    "span_columns",
    "complement",
    "span_sum",
    "intersect",
    "project",
    "contains",
    "compare",
]

ORTHONORMALITY_TOL = 1e-12


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerances used for rank and containment decisions.

    Parameters
    ----------
    rank_rel_tol
        Singular values below ``rank_rel_tol * sigma_max`` are treated as zero.
    angle_tol
        Largest principal-angle sine still regarded as containment.
    """

    rank_rel_tol: float = 1e-10
    angle_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel_tol", "angle_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2), got {value!r}")


DEFAULT_TOL = TolerancePolicy()


class Subspace:
    """Immutable linear subspace of C^m given by an orthonormal basis.

    Use :func:`orthonormalize` or :func:`span_columns` to build one from
    arbitrary spanning vectors; the constructor only accepts bases that are
    already orthonormal.
    """

    __slots__ = ("_basis", "_tol")

    def __init__(self, basis, tol: TolerancePolicy = DEFAULT_TOL):
        basis = np.array(basis, dtype=complex, copy=True)
        if basis.ndim != 2:
            raise ValueError("basis must be a 2-D array with basis vectors as columns")
        m, d = basis.shape
        if m < 1:
            raise ValueError("ambient dimension must be at least 1")
        if d > m:
            raise ValueError(f"{d} basis vectors cannot be independent in C^{m}")
        if not np.all(np.isfinite(basis)):
            raise NumericalError("non-finite entries in subspace basis")
        if d:
            gram_err = np.max(np.abs(basis.conj().T @ basis - np.eye(d)))
            if gram_err >= ORTHONORMALITY_TOL:
                raise NumericalError(
                    f"basis is not orthonormal (Gram deviation {gram_err:.3e})"
                )
        basis.setflags(write=False)
        self._basis = basis
        self._tol = tol

    @classmethod
    def zero(cls, m: int, tol: TolerancePolicy = DEFAULT_TOL) -> "Subspace":
        return cls(np.zeros((m, 0), dtype=complex), tol)

    @classmethod
    def full(cls, m: int, tol: TolerancePolicy = DEFAULT_TOL) -> "Subspace":
        return cls(np.eye(m, dtype=complex), tol)

    @property
    def basis(self) -> np.ndarray:
        """Read-only m x d array of orthonormal columns."""
        return self._basis

    @property
    def tol(self) -> TolerancePolicy:
        return self._tol

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0]

    @property
    def dim(self) -> int:
        return self._basis.shape[1]

    def projector(self) -> np.ndarray:
        return self._basis @ self._basis.conj().T

    def with_tol(self, tol: TolerancePolicy) -> "Subspace":
        return Subspace(self._basis, tol)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def numerical_rank(singular_values, tol: TolerancePolicy = DEFAULT_TOL, scale: float = 0.0) -> int:
    """Count singular values at or above ``rank_rel_tol * max(sigma_max, scale)``.

    ``scale`` lets callers whose matrices come from orthonormal data use an
    absolute reference of 1, so a block that is pure rounding noise is not
    promoted to full rank by the relative rule.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0:
        return 0
    ref = max(float(s.max()), scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s >= tol.rank_rel_tol * ref))


def span_columns(mat, tol: TolerancePolicy = DEFAULT_TOL, scale: float = 0.0) -> Subspace:
    """Subspace spanned by the columns of ``mat`` (m x k)."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2:
        raise ValueError("expected a 2-D array of column vectors")
    m, k = mat.shape
    if m < 1:
        raise ValueError("ambient dimension must be at least 1")
    if not np.all(np.isfinite(mat)):
        raise NumericalError("non-finite entries in spanning set")
    if k == 0:
        return Subspace.zero(m, tol)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    r = numerical_rank(s, tol, scale)
    return Subspace(u[:, :r], tol)


def orthonormalize(
    vectors: Iterable,
    tol: TolerancePolicy = DEFAULT_TOL,
    *,
    ambient_dim: int | None = None,
    scale: float = 0.0,
) -> Subspace:
    """Orthonormal basis for the numerical span of ``vectors``.

    Parameters
    ----------
    vectors
        Sequence of vectors of equal length m (a 2-D array is read row by row).
    tol
        Tolerance policy; singular values below ``rank_rel_tol * sigma_max``
        are truncated.
    ambient_dim
        Required when ``vectors`` is empty, otherwise checked against m.
    scale
        Optional absolute reference for the rank cutoff, see
        :func:`numerical_rank`.
    """
    rows = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not rows:
        if ambient_dim is None:
            raise ValueError("ambient_dim is required for an empty spanning set")
        if ambient_dim < 1:
            raise ValueError("ambient dimension must be at least 1")
        return Subspace.zero(ambient_dim, tol)
    m = rows[0].size
    if any(r.size != m for r in rows):
        raise ValueError("all vectors must have the same length")
    if m < 1:
        raise ValueError("ambient dimension must be at least 1")
    if ambient_dim is not None and ambient_dim != m:
        raise AmbientMismatchError(f"vectors have length {m}, expected {ambient_dim}")
    return span_columns(np.column_stack(rows), tol, scale)


def _check_same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatchError(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )


def complement(a: Subspace) -> Subspace:
    """Orthogonal complement of ``a`` in C^m."""
    m, d = a.ambient_dim, a.dim
    if d == 0:
        return Subspace.full(m, a.tol)
    u, _, _ = np.linalg.svd(a.basis, full_matrices=True)
    return Subspace(u[:, d:], a.tol)


def span_sum(a: Subspace, b: Subspace) -> Subspace:
    """Subspace sum A + B."""
    _check_same_ambient(a, b)
    return span_columns(np.hstack([a.basis, b.basis]), a.tol, scale=1.0)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """A ∩ B, computed as the complement of (A^⊥ + B^⊥)."""
    _check_same_ambient(a, b)
    return complement(span_sum(complement(a), complement(b)))


def project(a: Subspace, v) -> np.ndarray:
    """Orthogonal projection of ``v`` onto ``a``.

    ``v`` may be a single vector or an m x k array of column vectors.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != a.ambient_dim:
        raise AmbientMismatchError(
            f"vector has length {v.shape[0]}, subspace lives in C^{a.ambient_dim}"
        )
    q = a.basis
    return q @ (q.conj().T @ v)


def contains(a: Subspace, v) -> bool:
    """True when ``v`` lies in ``a`` up to ``angle_tol`` relative to its norm."""
    v = np.asarray(v, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return True
    return bool(np.linalg.norm(v - project(a, v)) <= a.tol.angle_tol * nv)


class Inclusion(enum.Enum):
    EQUAL = "equal"
    A_SUBSET_B = "A_subset_B"
    B_SUBSET_A = "B_subset_A"
    INCOMPARABLE = "incomparable"


class Comparison(NamedTuple):
    inclusion: Inclusion
    angle: float  # largest principal angle between the smaller space and the other one

    @property
    def a_in_b(self) -> bool:
        return self.inclusion in (Inclusion.EQUAL, Inclusion.A_SUBSET_B)

    @property
    def b_in_a(self) -> bool:
        return self.inclusion in (Inclusion.EQUAL, Inclusion.B_SUBSET_A)

    @property
    def equal(self) -> bool:
        return self.inclusion is Inclusion.EQUAL


def _gap(a: Subspace, b: Subspace) -> float:
    # ||(I - P_B) P_A||_2, the sine of the largest principal angle when dim A <= dim B
    if a.dim == 0:
        return 0.0
    resid = a.basis - project(b, a.basis)
    return float(np.linalg.norm(resid, 2))


def compare(a: Subspace, b: Subspace) -> Comparison:
    """Classify the inclusion relationship between two subspaces."""
    _check_same_ambient(a, b)
    tol = a.tol.angle_tol
    gap_ab = _gap(a, b)
    gap_ba = _gap(b, a)
    a_in_b = gap_ab < tol
    b_in_a = gap_ba < tol
    small_gap = gap_ab if a.dim <= b.dim else gap_ba
    angle = float(np.arcsin(min(1.0, small_gap)))
    if a_in_b and b_in_a and a.dim == b.dim:
        inclusion = Inclusion.EQUAL
    elif a_in_b:
        inclusion = Inclusion.A_SUBSET_B
    elif b_in_a:
        inclusion = Inclusion.B_SUBSET_A
    else:
        inclusion = Inclusion.INCOMPARABLE
    return Comparison(inclusion, angle)
