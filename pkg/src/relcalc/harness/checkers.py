"""Executable checks of the perturbation-stability results.

Each ``check_*`` function takes one instance and returns a
:class:`TheoremReport` for it.  Instances that do not satisfy the hypotheses
of the result are reported as inapplicable, never as failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import pure_relative_bound, restricted_matrices
from ..deficiency import deficiency_index, deficiency_pair, lower_bound_constant
from ..errors import PreconditionError
from ..quotient import single_valued_part
from ..relation import Relation, components, is_hermitian, is_self_adjoint, op_sum, shift
from ..subspace import compare, complement

__all__ = [
    "TheoremReport",
    "LEMMA_3_1_SLACK",
    "LEMMA_3_2_RTOL",
    "WITNESS_SLACK",
    "check_lemma_2_4",
    "check_lemma_2_5",
    "check_lemma_3_1",
    "check_lemma_3_2",
    "check_lemma_3_3",
    "check_theorem_3_1",
    "check_corollary_3_2",
    "theorem_eps",
    "fuzz_conclusions",
]

LEMMA_3_1_SLACK = 1e-8
LEMMA_3_2_RTOL = 1e-10
WITNESS_SLACK = 1e-9


@dataclass
class TheoremReport:
    theorem_id: str
    instances_run: int = 0
    passes: int = 0
    failures: list[tuple[int, str]] = field(default_factory=list)
    inapplicable: list[tuple[int, str]] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "TheoremReport") -> "TheoremReport":
        return TheoremReport(
            self.theorem_id,
            self.instances_run + other.instances_run,
            self.passes + other.passes,
            self.failures + other.failures,
            self.inapplicable + other.inapplicable,
            {**self.tolerances, **other.tolerances},
        )

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "instances_run": self.instances_run,
            "passes": self.passes,
            "failures": [{"seed": s, "diagnostic": d} for s, d in self.failures],
            "inapplicable": [{"seed": s, "reason": d} for s, d in self.inapplicable],
            "tolerances": dict(sorted(self.tolerances.items())),
        }


def _finish(theorem_id, seed, problems, tolerances) -> TheoremReport:
    if problems:
        return TheoremReport(theorem_id, 1, 0, [(seed, "; ".join(problems))], [], tolerances)
    return TheoremReport(theorem_id, 1, 1, [], [], tolerances)


def _skip(theorem_id, seed, reason, tolerances=None) -> TheoremReport:
    return TheoremReport(theorem_id, 0, 0, [], [(seed, reason)], tolerances or {})


def _sample_domain(t: Relation, rng: np.random.Generator, k: int) -> np.ndarray:
    """k random vectors of D(T) as columns (zero columns when D(T) = {0})."""
    d = components(t).domain.basis
    if d.shape[1] == 0:
        return np.zeros((t.space_dim, k), dtype=complex)
    y = rng.standard_normal((d.shape[1], k)) + 1j * rng.standard_normal((d.shape[1], k))
    return d @ y


def _norms(t: Relation, xs: np.ndarray) -> np.ndarray:
    return np.linalg.norm(single_valued_part(t).apply(xs), axis=0)


def _contained(a, b) -> bool:
    return compare(a, b).a_in_b


def _defect(t: Relation) -> int:
    return complement(components(t).range).dim


def check_lemma_3_1(
    t: Relation,
    s: Relation,
    c: float,
    b: float | None = None,
    *,
    a: float | None = None,
    seed: int = 0,
) -> TheoremReport:
    """Lower bound (1 - b)c for T + S and equal range defects.

    Pass ``b`` for the relative route, or ``a`` (with ||S(x)|| <= a||x||,
    a < c) for the bounded route, in which case b = a / c.
    """
    tid = "3.1-lemma" if a is None else "3.1-corollary"
    tols = {"lower_bound_slack": LEMMA_3_1_SLACK}
    try:
        a_s, _, _ = restricted_matrices(s, t)
    except PreconditionError as exc:
        return _skip(tid, seed, str(exc), tols)
    if not _contained(components(s).mul_part, components(t).mul_part):
        return _skip(tid, seed, "S(0) is not contained in T(0)", tols)
    c_t = lower_bound_constant(t)
    if not (c > 0 and c_t >= c * (1 - 1e-12)):
        return _skip(tid, seed, f"lower bound c={c!r} not certified (c(T)={c_t!r})", tols)
    if a is not None:
        s_norm = float(np.linalg.norm(a_s, 2)) if a_s.size else 0.0
        if not (0 <= a < c and s_norm <= a * (1 + 1e-12) + 1e-15):
            return _skip(tid, seed, f"bounded hypothesis a={a!r} fails (||S||={s_norm!r}, c={c!r})", tols)
        b = a / c
    if b is None or not 0 <= b < 1:
        return _skip(tid, seed, f"relative bound b={b!r} not in [0, 1)", tols)
    p = pure_relative_bound(s, t)
    if a is None and p > b * (1 + 1e-12) + 1e-15:
        return _skip(tid, seed, f"pure relative bound {p!r} exceeds b={b!r}", tols)

    problems = []
    ts = op_sum(t, s)
    c1 = lower_bound_constant(ts)
    if c1 < (1 - b) * c - LEMMA_3_1_SLACK:
        problems.append(f"c(T+S)={c1!r} < (1-b)c={(1 - b) * c!r}")
    d_ts, d_t = _defect(ts), _defect(t)
    if d_ts != d_t:
        problems.append(f"dim R(T+S)^perp={d_ts} != dim R(T)^perp={d_t}")
    return _finish(tid, seed, problems, tols)


def check_lemma_3_2(t: Relation, z_samples, *, seed: int = 0, n_x: int = 50) -> TheoremReport:
    """||(T - z)x||^2 = ||(T - Re z)x||^2 + (Im z)^2 ||x||^2 on D(T)."""
    tid = "3.2"
    tols = {"identity_rtol": LEMMA_3_2_RTOL}
    if not is_hermitian(t):
        return _skip(tid, seed, "T is not Hermitian", tols)
    rng = np.random.default_rng(seed)
    xs = _sample_domain(t, rng, n_x)
    x2 = np.linalg.norm(xs, axis=0) ** 2
    problems = []
    for z in z_samples:
        z = complex(z)
        lhs = _norms(shift(t, z), xs) ** 2
        rhs = _norms(shift(t, z.real), xs) ** 2 + z.imag**2 * x2
        err = np.abs(lhs - rhs)
        bound = LEMMA_3_2_RTOL * np.maximum(np.maximum(lhs, rhs), 1.0)
        bad = np.flatnonzero(err > bound)
        if bad.size:
            j = bad[0]
            problems.append(f"z={z!r}: lhs={lhs[j]!r} rhs={rhs[j]!r}")
    return _finish(tid, seed, problems, tols)


def theorem_eps(b: float) -> float:
    """eps with (1 + eps) b^2 = (1 + b^2) / 2, the midpoint of the feasible range."""
    return (1.0 / (b * b) - 1.0) / 2.0


def _perturbation_hypotheses(t, s, a, b, rng, n_x):
    """Reason string if the hypotheses fail, else None."""
    if not is_hermitian(t):
        return "T is not Hermitian"
    if not is_hermitian(s):
        return "S is not Hermitian"
    pt, ps = components(t), components(s)
    if not _contained(pt.domain, ps.domain):
        return "D(T) is not contained in D(S)"
    if not _contained(ps.mul_part, pt.mul_part):
        return "S(0) is not contained in T(0)"
    if not (0 <= b < 1 and a >= 0):
        return f"witness (a={a!r}, b={b!r}) outside a >= 0, 0 <= b < 1"
    xs = _sample_domain(t, rng, n_x)
    lhs = _norms(s, xs)
    rhs = a * np.linalg.norm(xs, axis=0) + b * _norms(t, xs)
    if np.any(lhs > rhs + WITNESS_SLACK * np.maximum(rhs, 1.0)):
        return "witness inequality violated on sampled x"
    return None


def _perturbation_conclusions(t, s, a, b, rng, n_x, self_adjoint: bool):
    problems = []
    ts = op_sum(t, s)
    if not is_hermitian(ts):
        problems.append("T+S is not Hermitian")
        return problems
    dp_t, dp_ts = deficiency_pair(t), deficiency_pair(ts)
    if dp_t != dp_ts:
        problems.append(f"d±(T+S)={tuple(dp_ts)} != d±(T)={tuple(dp_t)}")
    if b > 0:
        eps = theorem_eps(b)
        gamma = a / (b * math.sqrt(eps))
        factor = math.sqrt(1 + eps) * b
        xs = _sample_domain(t, rng, n_x)
        s_norms = _norms(s, xs)
        for sign in (1, -1):
            lam = -sign * 1j * gamma  # T ± iγ = T - (∓iγ)
            rhs = factor * _norms(shift(t, lam), xs)
            if np.any(s_norms > rhs + WITNESS_SLACK * np.maximum(rhs, 1.0)):
                problems.append(f"||Sx|| > (1+eps)^(1/2) b ||(T{'+' if sign > 0 else '-'}iγ)x|| (γ={gamma!r})")
            if gamma > 0:
                d_ts = deficiency_index(ts, lam).index
                d_t = deficiency_index(t, lam).index
                if d_ts != d_t:
                    problems.append(f"defect at {lam!r}: {d_ts} != {d_t}")
    if self_adjoint:
        sa_t, sa_ts = is_self_adjoint(t), is_self_adjoint(ts)
        if sa_t != sa_ts:
            problems.append(f"self-adjointness differs: T {sa_t}, T+S {sa_ts}")
    return problems


def _perturbation_check(tid, t, s, a, b, seed, n_x, self_adjoint):
    tols = {"witness_slack": WITNESS_SLACK}
    rng = np.random.default_rng(seed)
    reason = _perturbation_hypotheses(t, s, a, b, rng, n_x)
    if reason:
        return _skip(tid, seed, reason, tols)
    return _finish(tid, seed, _perturbation_conclusions(t, s, a, b, rng, n_x, self_adjoint), tols)


def check_lemma_3_3(t: Relation, s: Relation, witness_a: float, witness_b: float, *,
                    seed: int = 0, n_x: int = 50) -> TheoremReport:
    """d±(T+S) = d±(T), plus the intermediate inequality against T ± iγ."""
    return _perturbation_check("3.3", t, s, witness_a, witness_b, seed, n_x, False)


def check_theorem_3_1(t: Relation, s: Relation, witness_a: float, witness_b: float, *,
                      seed: int = 0, n_x: int = 50) -> TheoremReport:
    """T+S is self-adjoint exactly when T is, together with the deficiency-index conclusions."""
    return _perturbation_check("3.1-theorem", t, s, witness_a, witness_b, seed, n_x, True)


def _bounded_witness(t: Relation, s: Relation) -> float:
    a_s, _, _ = restricted_matrices(s, t)
    return float(np.linalg.norm(a_s, 2)) if a_s.size else 0.0


def check_lemma_2_5(t: Relation, s: Relation, *, seed: int = 0) -> TheoremReport:
    """S(0) ⊆ T(0) for T self-adjoint and S Hermitian with D(T) ⊆ D(S)."""
    tid = "2.5"
    reason = _lemma_2_5_hypotheses(t, s)
    if reason:
        return _skip(tid, seed, reason)
    problems = []
    if not _contained(components(s).mul_part, components(t).mul_part):
        problems.append("S(0) is not contained in T(0)")
    return _finish(tid, seed, problems, {})


def _lemma_2_5_hypotheses(t, s):
    if not is_self_adjoint(t):
        return "T is not self-adjoint"
    if not is_hermitian(s):
        return "S is not Hermitian"
    if not _contained(components(t).domain, components(s).domain):
        return "D(T) is not contained in D(S)"
    return None


def check_corollary_3_2(t: Relation, s: Relation, witness_a: float | None = None,
                        witness_b: float = 0.0, *, seed: int = 0, n_x: int = 50) -> TheoremReport:
    """T+S is self-adjoint for T self-adjoint, S Hermitian, D(T) ⊆ D(S).

    S(0) ⊆ T(0) is not assumed; it is derived first by check_lemma_2_5.
    Without an explicit witness the bounded one (||S on D(T)||, 0) is used.
    """
    tid = "3.2-corollary"
    tols = {"witness_slack": WITNESS_SLACK}
    reason = _lemma_2_5_hypotheses(t, s)
    if reason:
        return _skip(tid, seed, reason, tols)
    lemma = check_lemma_2_5(t, s, seed=seed)
    if lemma.failures:
        return _finish(tid, seed, [lemma.failures[0][1]], tols)
    a = _bounded_witness(t, s) if witness_a is None else witness_a
    rng = np.random.default_rng(seed)
    reason = _perturbation_hypotheses(t, s, a, witness_b, rng, n_x)
    if reason:
        return _skip(tid, seed, reason, tols)
    problems = _perturbation_conclusions(t, s, a, witness_b, rng, n_x, True)
    if not is_self_adjoint(op_sum(t, s)):
        problems.append("T+S is not self-adjoint")
    return _finish(tid, seed, problems, tols)


def check_lemma_2_4(t: Relation, lambdas=(1j, 2j, 1 + 1j, -0.5 + 3j), *, seed: int = 0) -> TheoremReport:
    """Hermitian T with R(T - λ) = R(T - λ̄) = X for a nonreal λ is self-adjoint."""
    tid = "2.4"
    if not is_hermitian(t):
        return _skip(tid, seed, "T is not Hermitian")
    witnesses = []
    for lam in lambdas:
        lam = complex(lam)
        if lam.imag == 0:
            continue
        if deficiency_index(t, lam).index == 0 and deficiency_index(t, lam.conjugate()).index == 0:
            witnesses.append(lam)
    if not witnesses:
        return _skip(tid, seed, "no sampled nonreal λ with R(T-λ) = R(T-conj λ) = X")
    problems = [] if is_self_adjoint(t) else [f"full ranges at λ={witnesses[0]!r} but T is not self-adjoint"]
    return _finish(tid, seed, problems, {})


def fuzz_conclusions(theorem_id: str, t: Relation, s: Relation, b: float) -> list[str]:
    """Conclusions violated by a pair that may break the hypotheses (b >= 1 allowed).

    Used for exploratory runs; nothing here is an assertion.
    """
    ts = op_sum(t, s)
    out = []
    if theorem_id == "3.1-lemma":
        c = lower_bound_constant(t)
        if lower_bound_constant(ts) < (1 - b) * c - LEMMA_3_1_SLACK:
            out.append("lower bound")
        if _defect(ts) != _defect(t):
            out.append("range defect")
        return out
    if not is_hermitian(ts):
        return ["T+S not Hermitian"]
    if deficiency_pair(ts) != deficiency_pair(t):
        out.append("deficiency indices")
    if theorem_id == "3.1-theorem" and is_self_adjoint(ts) != is_self_adjoint(t):
        out.append("self-adjointness")
    return out
