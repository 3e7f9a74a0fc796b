"""Relative bounds of one relation with respect to another.

All quantities are computed on D(T).  With D an orthonormal basis of D(T),
``A_T`` and ``A_S`` are the matrices of the single-valued parts of T and S
on D, so ``||T(x)|| = ||A_T y||`` and ``||S(x)|| = ||A_S y||`` for ``x = D y``.

Three bound shapes are supported:

* pure:       ||S(x)|| <= b ||T(x)||
* linear:     ||S(x)|| <= a ||x|| + b ||T(x)||
* quadratic:  ||S(x)||^2 <= a'^2 ||x||^2 + b'^2 ||T(x)||^2

The quadratic bound is an exact generalized eigenvalue computation.  The
linear bound uses that (a, b) is admissible exactly when, for every eps > 0,
the quadratic bound holds with a'^2 = (1 + 1/eps) a^2 and b'^2 = (1 + eps) b^2.
Hence b_min(a) = sup_eps q(a sqrt(1 + 1/eps)) / sqrt(1 + eps), where q is the
minimal quadratic b'.  Monotonicity of q brackets this supremum from above on
any eps grid, which gives a certified upper bound; a sphere search gives an
independent sampled lower bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize

from .errors import PreconditionError
from .quotient import single_valued_part
from .relation import Relation
from .subspace import TolerancePolicy, compare, numerical_rank

__all__ = [
    "BoundReport",
    "CurvePoint",
    "LinearBound",
    "restricted_matrices",
    "pure_relative_bound",
    "quadratic_bound",
    "linear_bound",
    "sample_linear_bound",
    "bound_curve",
    "convert_bounds",
    "quadratic_to_linear",
    "default_a_grid",
]

SAMPLE_CHUNK = 64
CERT_RTOL = 1e-7


def restricted_matrices(s: Relation, t: Relation):
    """Return ``(A_S, A_T, D)`` on an orthonormal basis D of D(T).

    Raises :class:`PreconditionError` unless D(T) ⊆ D(S).
    """
    if s.space_dim != t.space_dim:
        raise PreconditionError(f"space dims differ: {s.space_dim} vs {t.space_dim}")
    svp_t = single_valued_part(t)
    svp_s = single_valued_part(s)
    if not compare(svp_t.domain, svp_s.domain).a_in_b:
        raise PreconditionError("D(T) is not contained in D(S)")
    d = svp_t.domain_basis
    return svp_s.apply(d), svp_t.matrix, d


class _Pencil:
    """Precomputed SVD data for the pair (A_S, A_T) on D(T)."""

    def __init__(self, a_s: np.ndarray, a_t: np.ndarray, tol: TolerancePolicy):
        self.a_s = a_s
        self.a_t = a_t
        self.tol = tol
        self.r = a_t.shape[1]
        if self.r == 0:
            self.s_norm = 0.0
            self.scale = 1.0
            return
        self.s_norm = float(np.linalg.norm(a_s, 2))
        _, sig, vh = np.linalg.svd(a_t, full_matrices=True)
        self.scale = max(self.s_norm, float(sig[0]) if sig.size else 0.0, 1.0)
        k = numerical_rank(sig, tol, scale=self.scale)
        v = vh.conj().T
        self.sig = sig[:k]
        self.w = v[:, :k]
        self.ker = v[:, k:]
        self.s_on_ker = float(np.linalg.norm(a_s @ self.ker, 2)) if self.ker.shape[1] else 0.0
        gram_s = a_s.conj().T @ a_s
        self.gs_ww = self.w.conj().T @ gram_s @ self.w
        self.gs_wk = self.w.conj().T @ gram_s @ self.ker
        self.gs_kk = self.ker.conj().T @ gram_s @ self.ker

    def pure(self) -> float:
        if self.r == 0:
            return 0.0
        if self.s_on_ker > self.tol.angle_tol * self.scale:
            return math.inf
        if self.w.shape[1] == 0:
            return 0.0
        return float(np.linalg.norm(self.a_s @ self.w / self.sig, 2))

    def quadratic_sq(self, a_prime: float) -> float:
        """Minimal b'^2 for the quadratic bound, or inf."""
        if self.r == 0:
            return 0.0
        a2 = a_prime * a_prime
        thr = self.tol.angle_tol * self.scale**2
        k = self.w.shape[1]
        blk_a = self.gs_ww - a2 * np.eye(k)
        if self.ker.shape[1]:
            c = self.gs_kk - a2 * np.eye(self.ker.shape[1])
            cvals, cvecs = np.linalg.eigh(c)
            if cvals[-1] > thr:
                return math.inf
            neg = cvals < -thr
            flat = cvecs[:, ~neg]
            if flat.shape[1] and np.linalg.norm(self.gs_wk @ flat, 2) > math.sqrt(thr) * self.scale:
                return math.inf
            b_neg = self.gs_wk @ cvecs[:, neg]
            blk_a = blk_a - (b_neg / cvals[neg]) @ b_neg.conj().T
        if k == 0:
            return 0.0
        scaled = blk_a / np.outer(self.sig, self.sig)
        eigs = np.linalg.eigvalsh((scaled + scaled.conj().T) / 2)
        beta = float(eigs[-1])
        # rounding noise around an exactly vanishing bound
        if beta <= 1e-13 * max(1.0, float(np.abs(eigs).max())):
            return 0.0
        return beta

    def quadratic(self, a_prime: float) -> float:
        return math.sqrt(self.quadratic_sq(a_prime))

    def ratio(self, ys: np.ndarray, a: float) -> np.ndarray:
        """(||A_S y|| - a||y||) / ||A_T y|| clamped at 0, column-wise."""
        ny = np.linalg.norm(ys, axis=0)
        num = np.linalg.norm(self.a_s @ ys, axis=0) - a * ny
        den = np.linalg.norm(self.a_t @ ys, axis=0)
        out = np.zeros(ys.shape[1])
        # a numerator within the rounding error of the two norms is no evidence of b > 0
        pos = num > 16 * np.finfo(float).eps * (self.s_norm + a) * ny
        safe = pos & (den > 0)
        out[safe] = num[safe] / den[safe]
        out[pos & ~(den > 0)] = math.inf
        return out


def pure_relative_bound(s: Relation, t: Relation) -> float:
    """sup ||S(x)|| / ||T(x)|| over x in D(T) with T(x) ≠ 0 (inf if unbounded)."""
    a_s, a_t, _ = restricted_matrices(s, t)
    return _Pencil(a_s, a_t, t.tol).pure()


def quadratic_bound(s: Relation, t: Relation, a_prime: float) -> float:
    """Minimal b' with ||S(x)||^2 <= a'^2 ||x||^2 + b'^2 ||T(x)||^2 on D(T)."""
    if a_prime < 0:
        raise ValueError("a_prime must be nonnegative")
    a_s, a_t, _ = restricted_matrices(s, t)
    return _Pencil(a_s, a_t, t.tol).quadratic(a_prime)


@dataclass(frozen=True)
class LinearBound:
    """Bracket on b_min(a): ``lower <= b_min(a) <= upper``."""

    a: float
    upper: float
    lower: float
    eps: float | None = None  # eps attaining the lower value


def _chord_max(e0, e1, b0, b1, a2):
    """Upper bound of beta(alpha(eps)) / (1 + eps) on [e0, e1].

    beta is convex in alpha = a^2 (1 + 1/eps), so it lies below its chord;
    the chord bound is maximized in closed form.
    """
    if not (math.isfinite(b0) and math.isfinite(b1)):
        return math.inf
    al0, al1 = a2 * (1 + 1 / e0), a2 * (1 + 1 / e1)
    m = (b1 - b0) / (al1 - al0) if al1 != al0 else 0.0
    c1 = m * a2
    c0 = b0 + m * (a2 - al0)

    def g(e):
        return (c0 + c1 / e) / (1 + e)

    cands = [e0, e1]
    # stationary points solve c0 e^2 + 2 c1 e + c1 = 0
    if c0 != 0.0:
        disc = c1 * c1 - c0 * c1
        if disc >= 0:
            rt = math.sqrt(disc)
            cands += [(-c1 + rt) / c0, (-c1 - rt) / c0]
    elif c1 != 0.0:
        cands.append(-0.5)
    return max(g(e) for e in cands if e0 <= e <= e1)


def _interval_upper(eps, betas, a2, i):
    mono = betas[i + 1] / (1 + eps[i])
    return min(mono, _chord_max(eps[i], eps[i + 1], betas[i], betas[i + 1], a2))


def _linear_bound(p: _Pencil, a: float, max_rounds: int = 60) -> LinearBound:
    if p.r == 0 or p.s_norm <= a:
        return LinearBound(a, 0.0, 0.0)
    if a == 0.0:
        b = p.pure()
        return LinearBound(a, b, b)
    if p.s_on_ker > a * (1 + 1e-12) + p.tol.angle_tol * p.scale:
        return LinearBound(a, math.inf, math.inf)
    a2 = a * a

    def beta(e):
        return p.quadratic_sq(a * math.sqrt(1.0 + 1.0 / e))

    # below eps0 the shifted a' exceeds ||A_S|| and beta vanishes
    eps0 = 1.0 / ((p.s_norm / a) ** 2 - 1.0)
    beta_at_a = p.quadratic_sq(a)
    eps = [float(e) for e in np.geomspace(eps0, eps0 * 1e4 + 1e4, 33)]
    betas = [beta(e) for e in eps]

    def lower_sq():
        return max(b / (1 + e) for b, e in zip(betas, eps))

    for _ in range(40):
        if not math.isfinite(beta_at_a) or beta_at_a / (1 + eps[-1]) <= lower_sq():
            break
        eps.append(eps[-1] * 100.0)
        betas.append(beta(eps[-1]))

    target_rel = (1 + CERT_RTOL) ** 2
    for _ in range(max_rounds):
        target = lower_sq() * target_rel
        split = [i for i in range(len(eps) - 1) if _interval_upper(eps, betas, a2, i) > target]
        if not split:
            break
        for i in reversed(split):
            mid = math.sqrt(eps[i] * eps[i + 1])
            eps.insert(i + 1, mid)
            betas.insert(i + 1, beta(mid))

    vals = [b / (1 + e) for b, e in zip(betas, eps)]
    best = int(np.argmax(vals))
    ups = [_interval_upper(eps, betas, a2, i) for i in range(len(eps) - 1)]
    tail = beta_at_a / (1 + eps[-1]) if math.isfinite(beta_at_a) else math.inf
    upper_sq = max([vals[best], tail] + ups)
    return LinearBound(a, math.sqrt(upper_sq), math.sqrt(vals[best]), eps[best])


def linear_bound(s: Relation, t: Relation, a: float) -> LinearBound:
    """Certified bracket on the minimal b with ||S(x)|| <= a||x|| + b||T(x)||."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    a_s, a_t, _ = restricted_matrices(s, t)
    return _linear_bound(_Pencil(a_s, a_t, t.tol), a)


def _random_sphere(rng: np.random.Generator, r: int, k: int) -> np.ndarray:
    y = rng.standard_normal((r, k)) + 1j * rng.standard_normal((r, k))
    return y / np.linalg.norm(y, axis=0)


def _sample_chunk(p: _Pencil, a: float, seed_seq: np.random.SeedSequence, k: int):
    ys = _random_sphere(np.random.default_rng(seed_seq), p.r, k)
    vals = p.ratio(ys, a)
    order = np.argsort(-vals, kind="stable")
    return [(float(vals[i]), ys[:, i]) for i in order[:5]]


def _structured_starts(p: _Pencil, a: float) -> list[np.ndarray]:
    """Heuristic starting vectors for the local search."""
    starts = []
    _, _, vh_s = np.linalg.svd(p.a_s, full_matrices=False)
    starts += list(vh_s.conj()[: min(2, p.r)])
    _, _, vh_t = np.linalg.svd(p.a_t, full_matrices=True)
    starts.append(vh_t.conj()[-1])
    gram_s = p.a_s.conj().T @ p.a_s - a * a * np.eye(p.r)
    gram_t = p.a_t.conj().T @ p.a_t
    shift = 1e-8 * max(1.0, float(np.abs(gram_t).max()))
    _, vecs = eigh(gram_s, gram_t + shift * np.eye(p.r))
    starts += [vecs[:, -1], vecs[:, max(p.r - 2, 0)]]
    return [v / np.linalg.norm(v) for v in starts if np.linalg.norm(v) > 0]


def _sample(p: _Pencil, a: float, seed: int, n_samples: int | None, n_local: int, workers: int,
            extra_starts=()):
    if p.r == 0:
        return 0.0, np.zeros(0, dtype=complex)
    n_samples = n_samples or max(10 * p.r * p.r, 10)
    n_chunks = -(-n_samples // SAMPLE_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(SAMPLE_CHUNK, n_samples - i * SAMPLE_CHUNK) for i in range(n_chunks)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(lambda args: _sample_chunk(p, a, *args), zip(seqs, sizes)))
    else:
        chunks = [_sample_chunk(p, a, sq, k) for sq, k in zip(seqs, sizes)]
    # chunk results arrive in chunk order, so the merge does not depend on thread count
    cands = sorted(
        ((v, ci, j, y) for ci, ch in enumerate(chunks) for j, (v, y) in enumerate(ch)),
        key=lambda c: (-c[0], c[1], c[2]),
    )
    best_val, best_y = cands[0][0], cands[0][3]
    if not math.isfinite(best_val):
        return best_val, best_y

    starts = [c[3] for c in cands[:n_local]] + _structured_starts(p, a) + list(extra_starts)
    ys = _ascend(p, a, np.column_stack(starts))
    vals = p.ratio(ys, a)
    j = int(np.argmax(vals))
    if vals[j] > best_val:
        best_val, best_y = float(vals[j]), ys[:, j]
    y = _polish(p, a, best_y)
    v = float(p.ratio(y[:, None], a)[0])
    if v > best_val:
        best_val, best_y = v, y
    return best_val, best_y


def _raw_ratio(p: _Pencil, ys: np.ndarray, a: float) -> np.ndarray:
    # unclamped, so the search can climb out of the region where the numerator is negative
    num = np.linalg.norm(p.a_s @ ys, axis=0) - a * np.linalg.norm(ys, axis=0)
    den = np.linalg.norm(p.a_t @ ys, axis=0)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), -np.inf)


def _ratio_grad(p: _Pencil, ys: np.ndarray, a: float):
    sy_vec, ty_vec = p.a_s @ ys, p.a_t @ ys
    sy = np.linalg.norm(sy_vec, axis=0)
    ty = np.linalg.norm(ty_vec, axis=0)
    ny = np.linalg.norm(ys, axis=0)
    sy_safe = np.where(sy > 0, sy, 1.0)
    ty_safe = np.where(ty > 0, ty, 1.0)
    num = sy - a * ny
    # real gradient of ||M y|| is M^H M y / ||M y||
    g_num = (p.a_s.conj().T @ sy_vec) / sy_safe - a * ys / ny
    g_den = (p.a_t.conj().T @ ty_vec) / ty_safe
    g = g_num / ty_safe - num * g_den / ty_safe**2
    return g - ys * np.real(np.sum(ys.conj() * g, axis=0))


def _ascend(p: _Pencil, a: float, ys: np.ndarray, iters: int = 60) -> np.ndarray:
    """Batched gradient ascent of the ratio on the unit sphere, one column per start."""
    ys = ys / np.linalg.norm(ys, axis=0)
    vals = _raw_ratio(p, ys, a)
    step = np.full(ys.shape[1], 0.1)
    for _ in range(iters):
        g = _ratio_grad(p, ys, a)
        gn = np.linalg.norm(g, axis=0)
        active = (gn > 1e-13) & np.isfinite(vals)
        if not active.any():
            break
        trial = ys + g * (step / np.where(gn > 0, gn, 1.0))
        trial /= np.linalg.norm(trial, axis=0)
        tv = _raw_ratio(p, trial, a)
        ok = active & (tv > vals)
        ys[:, ok] = trial[:, ok]
        vals[ok] = tv[ok]
        step = np.where(ok, np.minimum(step * 1.5, 1.0), step * 0.5)
        if np.all(step[active] < 1e-12):
            break
    return ys


def _polish(p: _Pencil, a: float, y0: np.ndarray) -> np.ndarray:
    def neg(z):
        y = (z[: p.r] + 1j * z[p.r :])[:, None]
        ny = np.linalg.norm(y)
        v = _raw_ratio(p, y / ny, a)[0]
        if not np.isfinite(v):
            return 0.0, np.zeros_like(z)
        g = _ratio_grad(p, y / ny, a)[:, 0] / ny
        return -v, -np.concatenate([g.real, g.imag])

    res = minimize(neg, np.concatenate([y0.real, y0.imag]), jac=True, method="BFGS",
                   options={"gtol": 1e-12, "maxiter": 200})
    y = res.x[: p.r] + 1j * res.x[p.r :]
    return y / np.linalg.norm(y)


def sample_linear_bound(
    s: Relation,
    t: Relation,
    a: float,
    seed: int = 0,
    n_samples: int | None = None,
    n_local: int = 16,
    workers: int = 1,
):
    """Sampled lower bound on b_min(a) and the coefficient vector attaining it.

    Returns ``(value, x)`` with ``x`` a unit vector of D(T) in ambient coordinates.
    """
    a_s, a_t, d = restricted_matrices(s, t)
    val, y = _sample(_Pencil(a_s, a_t, t.tol), a, seed, n_samples, n_local, workers)
    return val, d @ y if y.size else np.zeros(t.space_dim, dtype=complex)


@dataclass(frozen=True)
class CurvePoint:
    a: float
    b_certified: float
    b_sampled: float


@dataclass
class BoundReport:
    pure_b: float
    curve: list[CurvePoint] = field(default_factory=list)
    t_bound: float = 0.0
    quadratic: tuple[float, float] | None = None

    def to_csv(self) -> str:
        lines = ["a,b_certified,b_sampled"]
        lines += [f"{p.a!r},{p.b_certified!r},{p.b_sampled!r}" for p in self.curve]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        """JSON-ready form; an infinite bound is written as None."""

        def num(v):
            return None if math.isinf(v) else v

        return {
            "pure_b": num(self.pure_b),
            "t_bound": num(self.t_bound),
            "curve": [{"a": p.a, "b_certified": num(p.b_certified), "b_sampled": num(p.b_sampled)} for p in self.curve],
            "quadratic": None if self.quadratic is None else {"a_prime": self.quadratic[0], "b_prime": num(self.quadratic[1])},
        }


def default_a_grid(a_s: np.ndarray, points: int = 32) -> list[float]:
    """0 followed by a geometric grid between the extreme singular values of A_S."""
    if a_s.size == 0:
        return [0.0]
    sig = np.linalg.svd(a_s, compute_uv=False)
    hi = float(sig[0])
    if hi == 0.0:
        return [0.0]
    lo = max(float(sig[-1]), 1e-3 * hi)
    # geomspace jitters by an ulp when lo == hi; keep the grid ascending
    grid = np.maximum.accumulate(np.geomspace(lo, hi, points - 1))
    return [0.0] + [float(v) for v in grid]


def bound_curve(
    s: Relation,
    t: Relation,
    a_grid=None,
    seed: int = 0,
    workers: int = 1,
    n_samples: int | None = None,
    a_prime: float | None = None,
) -> BoundReport:
    """Tradeoff curve a ↦ b_min(a) for the linear bound, certified and sampled."""
    a_s, a_t, _ = restricted_matrices(s, t)
    p = _Pencil(a_s, a_t, t.tol)
    grid = default_a_grid(a_s) if a_grid is None else [float(a) for a in a_grid]
    if any(a < 0 for a in grid):
        raise ValueError("a_grid must be nonnegative")
    if any(x > y for x, y in zip(grid, grid[1:])):
        raise ValueError("a_grid must be ascending")
    seqs = np.random.SeedSequence(seed).spawn(len(grid))
    curve = []
    prev = []
    for a, sq in zip(grid, seqs):
        cert = _linear_bound(p, a)
        sub_seed = int(sq.generate_state(1, dtype=np.uint64)[0])
        sampled, y = _sample(p, a, sub_seed, n_samples, 16, workers, prev)
        # the maximizer for the previous a seeds the search at the next one
        prev = [y] if y.size and np.linalg.norm(y) > 0 else []
        curve.append(CurvePoint(a, cert.upper, sampled))
    # a = ||A_S|| absorbs the whole perturbation into the a-term
    t_bound = min([c.b_certified for c in curve] + [_linear_bound(p, p.s_norm).upper])
    quad = None if a_prime is None else (a_prime, p.quadratic(a_prime))
    return BoundReport(p.pure(), curve, t_bound, quad)


def convert_bounds(a: float, b: float, eps: float) -> tuple[float, float]:
    """Linear witness (a, b) to a quadratic witness (a', b') for a given eps > 0."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if a < 0 or b < 0:
        raise ValueError("a and b must be nonnegative")
    return math.sqrt(1.0 + 1.0 / eps) * a, math.sqrt(1.0 + eps) * b


def quadratic_to_linear(a_prime: float, b_prime: float) -> tuple[float, float]:
    """A quadratic witness (a', b') is also a linear witness with a = a', b = b'."""
    if a_prime < 0 or b_prime < 0:
        raise ValueError("a' and b' must be nonnegative")
    return a_prime, b_prime
