import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from pairs import bound_pair, restricted
from relcalc import (
    BoundReport,
    PreconditionError,
    Relation,
    Subspace,
    bound_curve,
    convert_bounds,
    default_a_grid,
    linear_bound,
    pure_relative_bound,
    quadratic_bound,
    quadratic_to_linear,
    relation_norm_at,
    restricted_matrices,
    sample_linear_bound,
    single_valued_part,
)

diag = lambda *v: Relation.from_matrix(np.diag(v))  # noqa: E731


def gen_eig_max(ms, mt, a2=0.0):
    """Largest eigenvalue of (Ms^H Ms - a2 I) against Mt^H Mt (Mt injective)."""
    lhs = ms.conj().T @ ms - a2 * np.eye(ms.shape[1])
    rhs = mt.conj().T @ mt
    return float(sla.eigh(lhs, rhs, eigvals_only=True)[-1])


class TestPure:
    def test_self(self, rng):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        t = Relation.from_matrix(g)
        assert math.isclose(pure_relative_bound(t, t), 1.0, rel_tol=1e-10)

    def test_diag(self):
        assert math.isclose(pure_relative_bound(diag(1, 1), diag(1, 2)), 1.0, rel_tol=1e-12)
        # oracle: generalized eigenproblem
        assert math.isclose(math.sqrt(gen_eig_max(np.eye(2), np.diag([1.0, 2.0]))), 1.0)

    def test_unbounded(self):
        assert pure_relative_bound(Relation.from_matrix(np.eye(2)), diag(0, 1)) == math.inf

    def test_kernel_annihilated_is_finite(self):
        assert math.isclose(pure_relative_bound(diag(0, 3), diag(0, 1)), 3.0)

    def test_domain_precondition(self):
        s = Relation.from_pairs([(np.array([1, 0]), np.array([1, 0]))])
        with pytest.raises(PreconditionError):
            pure_relative_bound(s, Relation.from_matrix(np.eye(2)))

    def test_matches_generalized_eigenproblem(self):
        for seed in range(40):
            s, t = bound_pair(seed)
            ms, mt, _ = restricted(s, t)
            if mt.shape[1] == 0 or np.linalg.svd(mt, compute_uv=False)[-1] < 1e-6:
                continue
            ref = math.sqrt(max(gen_eig_max(ms, mt), 0.0))
            assert math.isclose(pure_relative_bound(s, t), ref, rel_tol=1e-8, abs_tol=1e-12)

    def test_restricted_matrices_match_oracle(self):
        for seed in range(20):
            s, t = bound_pair(seed)
            a_s, a_t, d = restricted_matrices(s, t)
            ms, mt, d_ref = restricted(s, t)
            # compare the Gram matrices, which do not depend on the basis of D(T)
            change = d.conj().T @ d_ref
            np.testing.assert_allclose(a_s @ change, ms, atol=1e-9)
            np.testing.assert_allclose(a_t @ change, mt, atol=1e-9)


class TestQuadratic:
    def test_self(self):
        t = diag(1, 2)
        assert math.isclose(quadratic_bound(t, t, 0.0), 1.0, rel_tol=1e-12)

    def test_diag_examples(self):
        assert math.isclose(quadratic_bound(diag(1, 1), diag(1, 2), 0.0), 1.0, rel_tol=1e-12)
        assert quadratic_bound(diag(1, 1), diag(1, 2), 1.0) == 0.0

    def test_degenerate_direction(self):
        assert quadratic_bound(Relation.from_matrix(np.eye(2)), diag(0, 1), 0.5) == math.inf
        # a' absorbs S on the kernel of T
        assert math.isfinite(quadratic_bound(Relation.from_matrix(np.eye(2)), diag(0, 1), 1.0))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            quadratic_bound(diag(1, 1), diag(1, 1), -1.0)

    def test_matches_oracle_and_monotone(self):
        for seed in range(40):
            s, t = bound_pair(seed)
            ms, mt, _ = restricted(s, t)
            if mt.shape[1] == 0 or np.linalg.svd(mt, compute_uv=False)[-1] < 1e-6:
                continue
            s_norm = np.linalg.norm(ms, 2)
            prev = math.inf
            for a_p in np.linspace(0, 1.2 * s_norm, 9):
                got = quadratic_bound(s, t, a_p)
                ref = math.sqrt(max(gen_eig_max(ms, mt, a_p**2), 0.0))
                assert math.isclose(got, ref, rel_tol=1e-7, abs_tol=1e-7)
                assert got <= prev + 1e-12
                prev = got


class TestConversions:
    def test_unit(self):
        ap, bp = convert_bounds(1, 1, 1)
        assert math.isclose(ap, math.sqrt(2)) and math.isclose(bp, math.sqrt(2))

    @pytest.mark.parametrize("eps", [0.01, 0.1, 1, 10, 1e3])
    def test_zero_b(self, eps):
        assert convert_bounds(0.7, 0, eps)[1] == 0

    @given(st.floats(1e-6, 1e6))
    def test_zero_a(self, eps):
        ap, bp = convert_bounds(0, 0.5, eps)
        assert ap == 0 and math.isclose(bp, 0.5 * math.sqrt(1 + eps))

    @pytest.mark.parametrize("eps", [0, -1])
    def test_bad_eps(self, eps):
        with pytest.raises(ValueError):
            convert_bounds(1, 1, eps)

    def test_reverse(self):
        assert quadratic_to_linear(0.3, 0.4) == (0.3, 0.4)
        with pytest.raises(ValueError):
            quadratic_to_linear(-1, 0)


class TestLinearBound:
    def test_a_zero_is_pure(self):
        for seed in range(15):
            s, t = bound_pair(seed)
            p = pure_relative_bound(s, t)
            lb = linear_bound(s, t, 0.0)
            if math.isinf(p):
                assert lb.upper == math.inf
            else:
                assert math.isclose(lb.upper, p, rel_tol=1e-9, abs_tol=1e-14)

    def test_absorbed(self):
        for seed in range(15):
            s, t = bound_pair(seed)
            a_s, _, _ = restricted_matrices(s, t)
            s_norm = np.linalg.norm(a_s, 2) if a_s.size else 0.0
            assert linear_bound(s, t, s_norm * (1 + 1e-12)).upper == 0.0

    def test_exact_absorption(self):
        assert linear_bound(diag(2, 2), diag(1, 10), 2.0).upper == 0.0

    def test_bracket(self):
        for seed in range(30):
            s, t = bound_pair(seed)
            a_s, _, _ = restricted_matrices(s, t)
            if not a_s.size:
                continue
            a = 0.4 * np.linalg.norm(a_s, 2)
            lb = linear_bound(s, t, a)
            assert lb.lower <= lb.upper
            assert lb.upper - lb.lower <= 1e-6 * max(lb.upper, 1e-12)

    def test_negative_a(self):
        with pytest.raises(ValueError):
            linear_bound(diag(1, 1), diag(1, 1), -0.1)


def _points(s, t, a, xs):
    norms_s = np.linalg.norm(single_valued_part(s).apply(xs), axis=0)
    norms_t = np.linalg.norm(single_valued_part(t).apply(xs), axis=0)
    return norms_s, a * np.linalg.norm(xs, axis=0), norms_t


class TestCurve:
    def test_examples(self):
        rep = bound_curve(diag(2, 2), diag(1, 10), [0.0, 1.0, 2.0, 3.0])
        assert math.isclose(rep.curve[0].b_certified, 2.0, rel_tol=1e-12)
        assert rep.curve[2].b_certified == 0.0 and rep.curve[3].b_certified == 0.0
        assert rep.t_bound == 0.0

    def test_soundness_and_tightness(self):
        for seed in range(12):
            s, t = bound_pair(seed)
            rep = bound_curve(s, t, default_a_grid(restricted_matrices(s, t)[0], 10), seed=seed)
            rng = np.random.default_rng(seed)
            d = restricted_matrices(s, t)[2]
            if d.shape[1] == 0:
                continue
            xs = d @ (rng.standard_normal((d.shape[1], 1000)) + 1j * rng.standard_normal((d.shape[1], 1000)))
            ns, nx, nt = _points(s, t, 1.0, xs)
            for pt in rep.curve:
                if math.isinf(pt.b_certified):
                    continue
                assert np.all(ns <= pt.a * nx + (pt.b_certified + 1e-9) * nt)
                val, x = sample_linear_bound(s, t, pt.a, seed=seed)
                if val > 0:
                    lhs = relation_norm_at(s, x)
                    rhs = pt.a * np.linalg.norm(x) + (pt.b_certified - 1e-6) * relation_norm_at(t, x)
                    assert lhs >= rhs

    def test_monotone_and_bracketed(self):
        for seed in range(12):
            s, t = bound_pair(seed)
            rep = bound_curve(s, t, default_a_grid(restricted_matrices(s, t)[0], 12), seed=seed)
            certs = [p.b_certified for p in rep.curve]
            assert all(x >= y for x, y in zip(certs, certs[1:]))
            for p in rep.curve:
                assert p.b_sampled <= p.b_certified * (1 + 1e-12) + 1e-14
            assert rep.t_bound == 0.0
            assert rep.t_bound <= min(certs)

    def test_default_grid(self):
        grid = default_a_grid(np.diag([1.0, 4.0]))
        assert grid[0] == 0.0 and len(grid) == 32
        assert math.isclose(grid[1], 1.0) and math.isclose(grid[-1], 4.0)
        assert default_a_grid(np.zeros((2, 0))) == [0.0]

    @pytest.mark.parametrize("grid", [[-1.0, 0.0], [1.0, 0.5]])
    def test_grid_validation(self, grid):
        with pytest.raises(ValueError):
            bound_curve(diag(1, 1), diag(1, 2), grid)

    def test_thread_count_does_not_matter(self):
        s, t = bound_pair(4)
        one = bound_curve(s, t, seed=11, workers=1, n_samples=700)
        four = bound_curve(s, t, seed=11, workers=4, n_samples=700)
        assert one == four

    def test_quadratic_field_and_csv(self):
        rep = bound_curve(diag(1, 1), diag(1, 2), [0.0, 0.5], a_prime=1.0)
        assert rep.quadratic == (1.0, 0.0)
        lines = rep.to_csv().splitlines()
        assert lines[0] == "a,b_certified,b_sampled"
        assert len(lines) == 3
        assert [float(v) for v in lines[1].split(",")][:2] == [0.0, rep.curve[0].b_certified]

    def test_to_dict_handles_infinity(self):
        rep = BoundReport(math.inf, [], 0.0, (0.0, math.inf))
        assert rep.to_dict()["pure_b"] is None
        assert rep.to_dict()["quadratic"]["b_prime"] is None

    def test_empty_domain(self):
        t = Relation.multivalued(Subspace.full(2))
        rep = bound_curve(Relation.zero(2), t)
        assert rep.pure_b == 0.0 and rep.curve[0].b_certified == 0.0


def test_default_grid_single_singular_value():
    grid = default_a_grid(np.array([[0.2181358531535142]]), 8)
    assert all(x <= y for x, y in zip(grid, grid[1:]))
