"""Linear relations on C^n stored as graph subspaces of C^n x C^n.

A graph vector is laid out as ``(x, f)``: the first n coordinates are the
x-part, the last n the f-part.  Inner products are linear in the first
argument, ``<u, v> = sum u_i conj(v_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatchError
from .subspace import (
    DEFAULT_TOL,
    Subspace,
    TolerancePolicy,
    compare,
    complement,
    contains,
    numerical_rank,
    span_columns,
)

__all__ = [
    "Relation",
    "RelationParts",
    "ImageSet",
    "components",
    "image_of",
    "scalar_mul",
    "op_sum",
    "adjoint",
    "shift",
    "is_hermitian",
    "is_self_adjoint",
    "inner",
]


def inner(u, v) -> complex:
    """<u, v>, linear in ``u``."""
    return complex(np.vdot(v, u))


class Relation:
    """A linear relation T in LR(C^n)."""

    __slots__ = ("_n", "_graph")

    def __init__(self, graph: Subspace):
        m = graph.ambient_dim
        if m % 2:
            raise ValueError(f"graph must live in an even-dimensional space, got C^{m}")
        self._n = m // 2
        self._graph = graph

    @classmethod
    def from_columns(cls, xs, fs, tol: TolerancePolicy = DEFAULT_TOL) -> "Relation":
        """Span of the pairs ``(xs[:, k], fs[:, k])``; both arrays are n x k."""
        xs = np.atleast_2d(np.asarray(xs, dtype=complex))
        fs = np.atleast_2d(np.asarray(fs, dtype=complex))
        if xs.shape != fs.shape:
            raise AmbientMismatchError(f"x-part {xs.shape} and f-part {fs.shape} differ")
        return cls(span_columns(np.vstack([xs, fs]), tol))

    @classmethod
    def from_pairs(cls, pairs, n: int | None = None, tol: TolerancePolicy = DEFAULT_TOL) -> "Relation":
        pairs = [(np.asarray(x, dtype=complex).ravel(), np.asarray(f, dtype=complex).ravel()) for x, f in pairs]
        if not pairs:
            if n is None:
                raise ValueError("n is required for an empty list of pairs")
            return cls.zero(n, tol)
        xs = np.column_stack([p[0] for p in pairs])
        fs = np.column_stack([p[1] for p in pairs])
        if n is not None and xs.shape[0] != n:
            raise AmbientMismatchError(f"pairs live in C^{xs.shape[0]}, expected C^{n}")
        return cls.from_columns(xs, fs, tol)

    @classmethod
    def from_matrix(cls, a, domain: Subspace | None = None, tol: TolerancePolicy = DEFAULT_TOL) -> "Relation":
        """Graph of the matrix ``a``, optionally restricted to ``domain``."""
        a = np.asarray(a, dtype=complex)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        d = np.eye(n, dtype=complex) if domain is None else domain.basis
        return cls.from_columns(d, a @ d, tol)

    @classmethod
    def zero(cls, n: int, tol: TolerancePolicy = DEFAULT_TOL) -> "Relation":
        """The trivial relation {(0, 0)}."""
        return cls(Subspace.zero(2 * n, tol))

    @classmethod
    def full(cls, n: int, tol: TolerancePolicy = DEFAULT_TOL) -> "Relation":
        """X x X."""
        return cls(Subspace.full(2 * n, tol))

    @classmethod
    def multivalued(cls, mul: Subspace) -> "Relation":
        """{0} x M."""
        n = mul.ambient_dim
        return cls.from_columns(np.zeros((n, mul.dim)), mul.basis, mul.tol)

    @property
    def space_dim(self) -> int:
        return self._n

    @property
    def graph(self) -> Subspace:
        return self._graph

    @property
    def tol(self) -> TolerancePolicy:
        return self._graph.tol

    @property
    def dim(self) -> int:
        return self._graph.dim

    @property
    def x_part(self) -> np.ndarray:
        return self._graph.basis[: self._n]

    @property
    def f_part(self) -> np.ndarray:
        return self._graph.basis[self._n :]

    def __add__(self, other: "Relation") -> "Relation":
        return op_sum(self, other)

    def __rmul__(self, alpha) -> "Relation":
        return scalar_mul(alpha, self)

    def __repr__(self):
        return f"Relation(n={self._n}, dim={self.dim})"


@dataclass(frozen=True)
class RelationParts:
    domain: Subspace
    range: Subspace
    mul_part: Subspace
    kernel: Subspace


def _split(block: np.ndarray, tol: TolerancePolicy):
    """SVD of a block of an orthonormal graph basis, with its numerical rank."""
    u, s, vh = np.linalg.svd(block, full_matrices=True)
    r = numerical_rank(s, tol, scale=1.0)
    return u, s, vh.conj().T, r


def components(t: Relation) -> RelationParts:
    """D(T), R(T), T(0) and ker T."""
    n, tol = t.space_dim, t.tol
    if t.dim == 0:
        z = Subspace.zero(n, tol)
        return RelationParts(z, z, z, z)
    x, f = t.x_part, t.f_part
    ux, _, vx, rx = _split(x, tol)
    uf, _, vf, rf = _split(f, tol)
    domain = Subspace(ux[:, :rx], tol)
    rng = Subspace(uf[:, :rf], tol)
    # graph coefficients annihilated by the x-block give {(0, f)} in T
    mul_part = span_columns(f @ vx[:, rx:], tol, scale=1.0)
    kernel = span_columns(x @ vf[:, rf:], tol, scale=1.0)
    return RelationParts(domain, rng, mul_part, kernel)


@dataclass(frozen=True)
class ImageSet:
    """The affine set T(x) = representative + T(0)."""

    representative: np.ndarray
    fiber: Subspace

    def contains(self, f) -> bool:
        f = np.asarray(f, dtype=complex)
        diff = f - self.representative
        scale = max(np.linalg.norm(f), np.linalg.norm(self.representative), 1.0)
        resid = diff - self.fiber.basis @ (self.fiber.basis.conj().T @ diff)
        return bool(np.linalg.norm(resid) <= self.fiber.tol.angle_tol * scale)


def _solve_x(t: Relation, xs: np.ndarray) -> np.ndarray:
    """Minimum-norm graph coefficients c with x_part @ c = xs (columns)."""
    u, s, v, r = _split(t.x_part, t.tol)
    return v[:, :r] @ ((u[:, :r].conj().T @ xs) / s[:r, None])


def image_of(t: Relation, x) -> ImageSet | None:
    """T(x), or ``None`` when x is not in D(T)."""
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != t.space_dim:
        raise AmbientMismatchError(f"vector has length {x.size}, relation lives on C^{t.space_dim}")
    parts = components(t)
    if not contains(parts.domain, x):
        return None
    if t.dim == 0:
        return ImageSet(np.zeros(t.space_dim, dtype=complex), parts.mul_part)
    c = _solve_x(t, x[:, None])
    return ImageSet((t.f_part @ c)[:, 0], parts.mul_part)


def _transform(t: Relation, new_x: np.ndarray, new_f: np.ndarray) -> Relation:
    return Relation(span_columns(np.vstack([new_x, new_f]), t.tol, scale=1.0))


def scalar_mul(alpha, t: Relation) -> Relation:
    """alpha T = {(x, alpha f)}."""
    return _transform(t, t.x_part, complex(alpha) * t.f_part)


def shift(t: Relation, lam) -> Relation:
    """T - lam I = {(x, f - lam x)}."""
    return _transform(t, t.x_part, t.f_part - complex(lam) * t.x_part)


def op_sum(t: Relation, s: Relation) -> Relation:
    """Operator-like sum T + S = {(x, f + g) : (x, f) in T, (x, g) in S}."""
    if t.space_dim != s.space_dim:
        raise AmbientMismatchError(f"space dims differ: {t.space_dim} vs {s.space_dim}")
    n, tol = t.space_dim, t.tol
    if t.dim + s.dim == 0:
        return Relation.zero(n, tol)
    # pairs of coefficients (c, e) with x_T c = x_S e share the same x
    stacked = np.hstack([t.x_part, -s.x_part])
    _, sv, vh = np.linalg.svd(stacked, full_matrices=True)
    r = numerical_rank(sv, tol, scale=1.0)
    null = vh.conj().T[:, r:]
    if null.shape[1] == 0:
        return Relation.zero(n, tol)
    c, e = null[: t.dim], null[t.dim :]
    xs = t.x_part @ c
    fs = t.f_part @ c + s.f_part @ e
    return Relation(span_columns(np.vstack([xs, fs]), tol, scale=1.0))


def adjoint(t: Relation) -> Relation:
    """T* as the orthogonal complement of the rotated graph {(-f, x)}."""
    rotated = np.vstack([-t.f_part, t.x_part])
    return Relation(complement(Subspace(rotated, t.tol)))


def is_hermitian(t: Relation) -> bool:
    """T ⊆ T*."""
    return compare(t.graph, adjoint(t).graph).a_in_b


def is_self_adjoint(t: Relation) -> bool:
    """T = T*; given T ⊆ T*, equality holds exactly when dim T = n."""
    return t.dim == t.space_dim and is_hermitian(t)
