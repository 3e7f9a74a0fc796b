"""Seeded random instance generators.

Every generator draws from its own stream derived from ``spec.seed`` so that
two generators fed the same spec never share random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import pure_relative_bound
from ..deficiency import lower_bound_constant
from ..errors import PreconditionError
from ..quotient import single_valued_part
from ..relation import Relation, components, scalar_mul, shift
from ..subspace import DEFAULT_TOL, Subspace, TolerancePolicy, complement, intersect, span_columns, span_sum

__all__ = [
    "InstanceSpec",
    "Perturbation",
    "instance_rng",
    "random_subspace",
    "random_hermitian",
    "gen_relation",
    "gen_self_adjoint",
    "gen_hermitian",
    "gen_perturbation",
    "gen_lemma_3_1_pair",
    "gen_corollary_3_1_pair",
    "gen_hermitian_over_self_adjoint",
]

# stream identifiers for instance_rng
_STREAMS = {
    "relation": 1,
    "self_adjoint": 2,
    "hermitian": 3,
    "perturbation": 4,
    "lemma_3_1": 5,
    "lemma_2_5": 6,
}


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    dim_mul: int = 0
    dim_dom: int | None = None
    seed: int = 0
    perturbation_target_b: float = 0.5
    tol: TolerancePolicy = DEFAULT_TOL

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be at least 1")
        if not 0 <= self.dim_mul <= self.n:
            raise PreconditionError(f"dim_mul must lie in [0, {self.n}]")
        if self.dim_dom is not None and not 0 <= self.dim_dom <= self.n - self.dim_mul:
            raise PreconditionError("dim_dom + dim_mul must not exceed n")
        if self.perturbation_target_b < 0:
            raise PreconditionError("perturbation_target_b must be nonnegative")

    @property
    def domain_dim(self) -> int:
        return self.n - self.dim_mul if self.dim_dom is None else self.dim_dom


@dataclass(frozen=True)
class Perturbation:
    """A perturbation S together with a witness pair (a, b) for ||Sx|| <= a||x|| + b||Tx||."""

    relation: Relation
    witness_a: float
    witness_b: float
    gamma: float | None = None


def instance_rng(spec: InstanceSpec, stream: str) -> np.random.Generator:
    seq = np.random.SeedSequence(spec.seed, spawn_key=(_STREAMS[stream],))
    return np.random.default_rng(seq)


def _gaussian(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_subspace(rng, container: np.ndarray, d: int, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Random d-dimensional subspace of the span of the orthonormal columns of ``container``."""
    m, k = container.shape
    if d > k:
        raise PreconditionError(f"cannot pick a {d}-dim subspace of a {k}-dim space")
    if d == 0:
        return Subspace.zero(m, tol)
    q, _ = np.linalg.qr(_gaussian(rng, k, d))
    return span_columns(container @ q, tol)


def random_hermitian(rng, k: int) -> np.ndarray:
    g = _gaussian(rng, k, k)
    return (g + g.conj().T) / 2


def _identity(n):
    return np.eye(n, dtype=complex)


def _assemble(xs, fs, mul: Subspace, tol) -> Relation:
    n = mul.ambient_dim
    xs = np.hstack([xs, np.zeros((n, mul.dim))])
    fs = np.hstack([fs, mul.basis])
    return Relation.from_columns(xs, fs, tol)


def gen_relation(spec: InstanceSpec) -> Relation:
    """Generic relation {(x, Ax + m) : x in Z, m in M} with random Z, M and complex A."""
    rng = instance_rng(spec, "relation")
    n, tol = spec.n, spec.tol
    mul = random_subspace(rng, _identity(n), spec.dim_mul, tol)
    dom = random_subspace(rng, _identity(n), spec.domain_dim, tol)
    a = _gaussian(rng, n, n)
    return _assemble(dom.basis, a @ dom.basis, mul, tol)


def _self_adjoint_parts(rng, n, dim_mul, tol):
    mul = random_subspace(rng, _identity(n), dim_mul, tol)
    w = complement(mul).basis
    h = random_hermitian(rng, w.shape[1])
    return mul, w, h


def gen_self_adjoint(spec: InstanceSpec) -> Relation:
    """{(x, Ax + m) : x in M^⊥, m in M} with A Hermitian on M^⊥."""
    rng = instance_rng(spec, "self_adjoint")
    mul, w, h = _self_adjoint_parts(rng, spec.n, spec.dim_mul, spec.tol)
    return _assemble(w, w @ h, mul, spec.tol)


def gen_hermitian(spec: InstanceSpec) -> Relation:
    """Random subspace of a self-adjoint relation that contains {0} x T(0).

    The result has dimension ``dim_dom + dim_mul``; it is self-adjoint when
    ``dim_dom = n - dim_mul``.
    """
    rng = instance_rng(spec, "hermitian")
    mul, w, h = _self_adjoint_parts(rng, spec.n, spec.dim_mul, spec.tol)
    k = w.shape[1]
    if k == 0:
        return Relation.multivalued(mul)
    q = random_subspace(rng, np.eye(k, dtype=complex), spec.domain_dim, spec.tol).basis
    return _assemble(w @ q, w @ h @ q, mul, spec.tol)


def _extended_domain(rng, dom: Subspace, avoid: Subspace, tol) -> Subspace:
    """D ⊕ (random part of (D + avoid)^⊥), of random extra dimension."""
    free = complement(span_sum(dom, avoid))
    extra = random_subspace(rng, free.basis, int(rng.integers(0, free.dim + 1)), tol)
    return span_sum(dom, extra)


def gen_perturbation(t: Relation, spec: InstanceSpec, fuzz: bool = False) -> Perturbation:
    """Hermitian S with D(T) ⊆ D(S) and S(0) ⊆ T(0), scaled to a target relative bound.

    S is built as {(x, Bx + m)} with B Hermitian, m ranging over a random
    subspace of T(0) ∩ D(T)^⊥, and rescaled so that
    ||S(x)|| <= b ||(T + iγ)(x)|| <= γ b ||x|| + b ||T(x)||.
    The returned witness is (γ b, b).  A target of 0 yields a bounded
    perturbation x ↦ c x with witness (|c|, 0).
    """
    target = spec.perturbation_target_b
    if not fuzz and not 0 <= target < 1:
        raise PreconditionError("perturbation_target_b must lie in [0, 1)")
    rng = instance_rng(spec, "perturbation")
    n, tol = t.space_dim, t.tol
    parts = components(t)
    avail = intersect(parts.mul_part, complement(parts.domain))
    mul = random_subspace(rng, avail.basis, int(rng.integers(0, avail.dim + 1)), tol)
    dom = _extended_domain(rng, parts.domain, mul, tol)
    if target == 0:
        c = float(rng.uniform(0.5, 2.0)) * (1 if rng.random() < 0.5 else -1)
        s = _assemble(dom.basis, c * dom.basis, mul, tol)
        return Perturbation(s, abs(c), 0.0)
    b = random_hermitian(rng, n)
    s_raw = _assemble(dom.basis, b @ dom.basis, mul, tol)
    gamma = float(rng.uniform(0.5, 2.0))
    p = pure_relative_bound(s_raw, shift(t, -1j * gamma))
    if not np.isfinite(p):
        raise PreconditionError("T + iγ is not injective on D(T); T is not Hermitian")
    if p == 0.0:
        # S vanishes on D(T); any witness holds
        return Perturbation(s_raw, 0.0, target, gamma)
    s = scalar_mul(target / p, s_raw)
    return Perturbation(s, gamma * target, target, gamma)


def _scaled_pair(spec: InstanceSpec, scale_to):
    rng = instance_rng(spec, "lemma_3_1")
    t = gen_relation(spec)
    tol = t.tol
    parts = components(t)
    mul = random_subspace(rng, parts.mul_part.basis, int(rng.integers(0, parts.mul_part.dim + 1)), tol)
    dom = _extended_domain(rng, parts.domain, Subspace.zero(t.space_dim, tol), tol)
    b = _gaussian(rng, t.space_dim, t.space_dim)
    s_raw = _assemble(dom.basis, b @ dom.basis, mul, tol)
    factor = scale_to(s_raw, t)
    return t, scalar_mul(factor, s_raw)


def gen_lemma_3_1_pair(spec: InstanceSpec):
    """(T, S) with D(T) ⊆ D(S), S(0) ⊆ T(0) and sup ||S(x)|| / ||T(x)|| = target b.

    T is a generic (non-Hermitian) relation; S has a random multivalued
    part inside T(0) and a domain extending D(T).
    """

    def scale(s_raw, t):
        p = pure_relative_bound(s_raw, t)
        if not np.isfinite(p) or p == 0.0:
            return 0.0
        return spec.perturbation_target_b / p

    return _scaled_pair(spec, scale)


def gen_corollary_3_1_pair(spec: InstanceSpec):
    """(T, S) with ||S(x)|| <= a ||x|| on D(T) where a = target_b * c(T) < c(T)."""

    def scale(s_raw, t):
        c = lower_bound_constant(t)
        if not np.isfinite(c):
            return 0.0
        svp_t = single_valued_part(t)
        s_norm = float(np.linalg.norm(single_valued_part(s_raw).apply(svp_t.domain_basis), 2)) if svp_t.domain_basis.shape[1] else 0.0
        if s_norm == 0.0:
            return 0.0
        return spec.perturbation_target_b * c / s_norm

    return _scaled_pair(spec, scale)


def gen_hermitian_over_self_adjoint(t: Relation, spec: InstanceSpec) -> Relation:
    """Random Hermitian S with D(T) ⊆ D(S).

    D(S) extends D(T) by a random subspace of D(T)^⊥; S(0) is then a random
    subspace of D(S)^⊥, and S = {(x, Bx + m)} with B Hermitian.  Nothing
    forces S(0) inside T(0) beyond S being Hermitian.
    """
    rng = instance_rng(spec, "lemma_2_5")
    n, tol = t.space_dim, t.tol
    dom = _extended_domain(rng, components(t).domain, Subspace.zero(n, tol), tol)
    free = complement(dom)
    mul = random_subspace(rng, free.basis, int(rng.integers(0, free.dim + 1)), tol)
    b = random_hermitian(rng, n)
    return _assemble(dom.basis, b @ dom.basis, mul, tol)

