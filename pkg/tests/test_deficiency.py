import math

import numpy as np
import pytest

import oracles
from relcalc import (
    LOWER_SAMPLES,
    UPPER_SAMPLES,
    NumericalError,
    PreconditionError,
    Relation,
    Subspace,
    components,
    deficiency_index,
    deficiency_pair,
    lower_bound_constant,
    shift,
    single_valued_part,
    span_columns,
)
from relcalc.harness import InstanceSpec, gen_hermitian

I2 = np.eye(2, dtype=complex)
e1 = I2[:, 0]


def test_hermitian_matrix_has_no_defect(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert deficiency_index(Relation.from_matrix(g + g.conj().T), 1j).index == 0


def test_partial_identity():
    t = Relation.from_pairs([(e1, e1)])
    rec = deficiency_index(t, 1j)
    assert rec.index == 1
    assert rec.lam == 1j
    # R(T - i) = span{(1 - i) e1}, so the defect space is span{e2}
    assert abs(rec.space.basis[0, 0]) < 1e-14
    assert deficiency_pair(t) == (1, 1)


def test_zero_relation():
    for lam in (1j, -3, 2 + 5j):
        assert deficiency_index(Relation.zero(2), lam).index == 2


def test_index_is_codimension_of_range(rng):
    for _ in range(100):
        n = int(rng.integers(1, 6))
        t = Relation(span_columns(oracles.random_graph(rng, n)))
        lam = complex(*rng.standard_normal(2))
        shifted = shift(t, lam).graph.basis
        rank = oracles.orth(shifted[n:]).shape[1]
        assert deficiency_index(t, lam).index == n - rank


def test_pair_requires_hermitian():
    with pytest.raises(PreconditionError):
        deficiency_pair(Relation.from_matrix(np.array([[0, 1], [0, 0]])))


def test_pair_detects_non_constant_half_plane(monkeypatch):
    import relcalc.deficiency as d

    real = d.deficiency_index

    def fake(t, lam):
        rec = real(t, lam)
        return d.DeficiencyRecord(rec.lam, rec.space, rec.index + (lam == 2j))

    monkeypatch.setattr(d, "deficiency_index", fake)
    with pytest.raises(NumericalError):
        deficiency_pair(Relation.from_matrix(I2))


def test_sample_points():
    assert all(z.imag > 0 for z in UPPER_SAMPLES)
    assert all(z.imag < 0 for z in LOWER_SAMPLES)


def test_half_plane_constancy_and_finite_dim_structure():
    for seed in range(200):
        n = 1 + seed % 6
        dim_mul = seed % n
        spec = InstanceSpec(n, dim_mul, (seed // 7) % (n - dim_mul + 1), seed=seed)
        t = gen_hermitian(spec)
        upper = {deficiency_index(t, z).index for z in UPPER_SAMPLES + (0.3 + 5j,)}
        lower = {deficiency_index(t, z).index for z in LOWER_SAMPLES + (-4 - 0.1j,)}
        assert len(upper) == len(lower) == 1
        assert deficiency_pair(t) == (n - t.dim, n - t.dim)


def test_shift_consistency(rng):
    for _ in range(60):
        n = int(rng.integers(1, 6))
        t = Relation(span_columns(oracles.random_graph(rng, n)))
        mu = float(rng.standard_normal() * 3)
        lam = complex(*rng.standard_normal(2))
        assert deficiency_index(t, lam).index == deficiency_index(shift(t, mu), lam - mu).index


class TestLowerBoundConstant:
    def test_diag(self):
        assert math.isclose(lower_bound_constant(Relation.from_matrix(np.diag([2, 3]))), 2)

    def test_kernel(self):
        assert lower_bound_constant(Relation.from_matrix(np.diag([0, 3]))) == 0.0

    def test_empty_domain(self):
        assert lower_bound_constant(Relation.multivalued(Subspace.full(3))) == math.inf
        assert lower_bound_constant(Relation.zero(2)) == math.inf

    def test_is_smallest_singular_value(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 6))
            t = Relation(span_columns(oracles.random_graph(rng, n, "operator")))
            m = single_valued_part(t).matrix
            if m.shape[1] == 0:
                continue
            c = lower_bound_constant(t)
            # ||T(x)|| >= c ||x|| on random domain vectors
            d = components(t).domain.basis
            for _ in range(10):
                x = d @ (rng.standard_normal(d.shape[1]) + 1j * rng.standard_normal(d.shape[1]))
                assert np.linalg.norm(m @ (d.conj().T @ x)) >= c * np.linalg.norm(x) * (1 - 1e-12)
            s = np.linalg.svd(m, compute_uv=False)
            assert c == 0.0 or math.isclose(c, s[-1], rel_tol=1e-12)

    def test_positive_lower_bound_means_closed_range(self):
        # every finite-dimensional range is closed; recorded for completeness
        t = Relation.from_matrix(np.diag([2.0, 3.0]))
        assert lower_bound_constant(shift(t, 1j)) > 0
        assert components(shift(t, 1j)).range.dim == 2
