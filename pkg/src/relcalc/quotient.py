"""Quotient spaces X/E, the single-valued part of a relation, and relation norms.

A class [x] in X/E is represented by its canonical representative in E^⊥,
which identifies X/E isometrically with E^⊥.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatchError, DomainError, NumericalError
from .relation import Relation, _split, components, image_of, inner
from .subspace import Subspace, complement, contains, project

__all__ = [
    "QuotientSpace",
    "SingleValuedPart",
    "quotient_inner",
    "single_valued_part",
    "relation_norm_at",
    "relation_norm",
]


class QuotientSpace:
    """X/E with the inner product <[x], [y]> = <x^⊥, y^⊥>."""

    def __init__(self, modulus: Subspace):
        self.modulus = modulus
        self.orth = complement(modulus)

    @property
    def ambient_dim(self) -> int:
        return self.modulus.ambient_dim

    def cls(self, x) -> np.ndarray:
        """Canonical representative of [x]."""
        x = np.asarray(x, dtype=complex)
        if x.shape[0] != self.ambient_dim:
            raise AmbientMismatchError(f"vector has length {x.shape[0]}, expected {self.ambient_dim}")
        return project(self.orth, x)

    def inner(self, x, y) -> complex:
        return inner(self.cls(x), self.cls(y))

    def norm(self, x) -> float:
        return float(np.linalg.norm(self.cls(x)))


def quotient_inner(e: Subspace, x, y) -> complex:
    return QuotientSpace(e).inner(x, y)


@dataclass(frozen=True)
class SingleValuedPart:
    """Matrix of x ↦ [f] on D(T), f any element of T(x).

    ``matrix`` is n x r: columns are the canonical representatives (in
    T(0)^⊥) of the images of the orthonormal domain basis vectors.
    """

    domain_basis: np.ndarray
    matrix: np.ndarray
    mul_part: Subspace
    source: Relation

    @property
    def domain(self) -> Subspace:
        return Subspace(self.domain_basis, self.source.tol)

    def apply(self, x) -> np.ndarray:
        """Image of ``x`` (vector or n x k columns), assumed to lie in D(T)."""
        x = np.asarray(x, dtype=complex)
        return self.matrix @ (self.domain_basis.conj().T @ x)

    def on(self, basis: np.ndarray) -> np.ndarray:
        """Matrix of the operator applied to the columns of ``basis``."""
        return self.apply(basis)


def single_valued_part(t: Relation) -> SingleValuedPart:
    n, tol = t.space_dim, t.tol
    parts = components(t)
    if t.dim == 0:
        return SingleValuedPart(np.zeros((n, 0), complex), np.zeros((n, 0), complex), parts.mul_part, t)
    u, s, v, r = _split(t.x_part, tol)
    # x_part @ (v_r / s_r) = u_r, so f-part @ (v_r / s_r) are representatives for u_r
    reps = t.f_part @ (v[:, :r] / s[:r])
    mul = parts.mul_part
    reps = reps - project(mul, reps)
    return SingleValuedPart(u[:, :r], reps, mul, t)


def relation_norm_at(t: Relation, x, verify: bool = False) -> float:
    """||T(x)|| = ||T̃ₛ x||.

    With ``verify=True`` the distance d(f, T(0)) from a freshly solved
    representative f ∈ T(x) is computed as well and the two must agree.
    """
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != t.space_dim:
        raise AmbientMismatchError(f"vector has length {x.size}, relation lives on C^{t.space_dim}")
    svp = single_valued_part(t)
    if not contains(svp.domain, x):
        raise DomainError("x is not in D(T)")
    value = float(np.linalg.norm(svp.apply(x)))
    if verify:
        img = image_of(t, x)
        f = img.representative
        dist = float(np.linalg.norm(f - project(img.fiber, f)))
        if abs(dist - value) > 1e-10 * max(1.0, value):
            raise NumericalError(f"||T(x)|| = {value!r} but d(f, T(0)) = {dist!r}")
    return value


def relation_norm(t: Relation) -> float:
    """||T|| = ||T̃ₛ||; zero when D(T) = {0}."""
    m = single_valued_part(t).matrix
    if m.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
