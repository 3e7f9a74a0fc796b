"""Suite runner: generate seeded instances, dispatch checkers, render reports.

Each instance gets its own 64-bit seed derived from the master seed and the
theorem's position in :data:`THEOREM_IDS`, so results do not depend on how
many worker threads run them or in what order they finish.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..deficiency import lower_bound_constant
from ..errors import PreconditionError
from ..subspace import DEFAULT_TOL, TolerancePolicy
from . import checkers as ck
from . import generators as gen

__all__ = [
    "THEOREM_IDS",
    "FUZZABLE",
    "SuiteConfig",
    "FuzzReport",
    "SuiteResult",
    "resolve_theorems",
    "instance_seeds",
    "run_instance",
    "run_suite",
    "render_text",
    "render_json",
]

THEOREM_IDS = ("2.4", "2.5", "3.1-lemma", "3.2", "3.3", "3.1-theorem", "3.2-corollary")
ALIASES = {"3.1": "3.1-theorem"}
FUZZABLE = ("3.1-lemma", "3.3", "3.1-theorem")

N_Z = 10
N_X = 50
BOUNDED_FRACTION = 0.15


@dataclass(frozen=True)
class SuiteConfig:
    theorems: tuple[str, ...] = THEOREM_IDS
    instances: int = 100
    seed: int = 0
    n_range: tuple[int, int] = (2, 6)
    dim_mul: int | None = None
    target_b: float | None = None
    workers: int = 1
    fuzz: bool = False
    tol: TolerancePolicy = DEFAULT_TOL

    def __post_init__(self):
        if self.instances < 1:
            raise PreconditionError("instances must be at least 1")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise PreconditionError(f"invalid n range {lo}..{hi}")
        if self.dim_mul is not None and not 0 <= self.dim_mul < lo:
            raise PreconditionError("dim_mul must be below the smallest n")
        if self.workers < 1:
            raise PreconditionError("workers must be at least 1")
        if self.target_b is not None:
            if self.fuzz and self.target_b < 0:
                raise PreconditionError("target_b must be nonnegative")
            if not self.fuzz and not 0 <= self.target_b < 1:
                raise PreconditionError("target_b must lie in [0, 1) outside fuzz mode")
        for tid in self.theorems:
            if tid not in THEOREM_IDS:
                raise PreconditionError(f"unknown theorem id {tid!r}")
            if self.fuzz and tid not in FUZZABLE:
                raise PreconditionError(f"fuzz mode supports {', '.join(FUZZABLE)}, not {tid}")


@dataclass
class FuzzReport:
    theorem_id: str
    instances_run: int = 0
    violations: dict[str, list[int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "instances_run": self.instances_run,
            "violations": {k: {"count": len(v), "seeds": v} for k, v in sorted(self.violations.items())},
        }


@dataclass
class SuiteResult:
    config: SuiteConfig
    reports: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(isinstance(r, FuzzReport) or r.ok for r in self.reports)


def resolve_theorems(names, fuzz: bool = False) -> tuple[str, ...]:
    """Canonical theorem ids in suite order; ``None`` or empty selects the default set."""
    if not names:
        return FUZZABLE if fuzz else THEOREM_IDS
    out = []
    for name in names:
        tid = ALIASES.get(name, name)
        if tid not in THEOREM_IDS:
            raise PreconditionError(f"unknown theorem id {name!r}; choose from {', '.join(THEOREM_IDS)}")
        if tid not in out:
            out.append(tid)
    return tuple(sorted(out, key=THEOREM_IDS.index))


def instance_seeds(seed: int, theorem_id: str, count: int) -> list[int]:
    root = np.random.SeedSequence([seed, THEOREM_IDS.index(theorem_id)])
    return [int(child.generate_state(1, np.uint64)[0]) for child in root.spawn(count)]


def _draw_spec(cfg: SuiteConfig, inst_seed: int, index: int, *, full_domain: bool | None = None):
    rng = np.random.default_rng(inst_seed)
    lo, hi = cfg.n_range
    n = int(rng.integers(lo, hi + 1))
    dim_mul = cfg.dim_mul if cfg.dim_mul is not None else int(rng.integers(0, n))
    free = n - dim_mul
    if full_domain is None:
        full_domain = rng.random() < 0.5
    dim_dom = free if full_domain else int(rng.integers(0, free + 1))
    if cfg.target_b is not None:
        b = cfg.target_b
    elif cfg.fuzz:
        b = float(rng.uniform(1.0, 3.0))
    elif rng.random() < BOUNDED_FRACTION:
        b = 0.0
    else:
        b = float(rng.uniform(0.0, 0.9))
    spec = gen.InstanceSpec(n, dim_mul, dim_dom, inst_seed, b, cfg.tol)
    return spec, rng


def _lemma_3_1(cfg, seed, index):
    spec, _ = _draw_spec(cfg, seed, index, full_domain=True)
    bounded = index % 2 == 1
    if bounded:
        t, s = gen.gen_corollary_3_1_pair(spec)
    else:
        t, s = gen.gen_lemma_3_1_pair(spec)
    c = lower_bound_constant(t)
    if cfg.fuzz:
        return t, s, c, spec.perturbation_target_b
    if bounded:
        rep = ck.check_lemma_3_1(t, s, c, a=spec.perturbation_target_b * c, seed=seed)
    else:
        rep = ck.check_lemma_3_1(t, s, c, spec.perturbation_target_b, seed=seed)
    rep.theorem_id = "3.1-lemma"
    return rep


def _perturbed(cfg, seed, index, self_adjoint: bool | None):
    spec, rng = _draw_spec(cfg, seed, index)
    if self_adjoint is None:
        self_adjoint = rng.random() < 0.5
    t = gen.gen_self_adjoint(spec) if self_adjoint else gen.gen_hermitian(spec)
    return t, gen.gen_perturbation(t, spec, fuzz=cfg.fuzz)


def run_instance(theorem_id: str, seed: int, index: int, cfg: SuiteConfig):
    """Run one instance; returns a TheoremReport, or a list of violated conclusions in fuzz mode."""
    if theorem_id == "2.4":
        spec, _ = _draw_spec(cfg, seed, index)
        return ck.check_lemma_2_4(gen.gen_hermitian(spec), seed=seed)
    if theorem_id == "3.2":
        spec, rng = _draw_spec(cfg, seed, index)
        zs = rng.normal(scale=2.0, size=N_Z) + 1j * rng.normal(scale=2.0, size=N_Z)
        return ck.check_lemma_3_2(gen.gen_hermitian(spec), zs, seed=seed, n_x=N_X)
    if theorem_id in ("2.5", "3.2-corollary"):
        spec, _ = _draw_spec(cfg, seed, index, full_domain=True)
        t = gen.gen_self_adjoint(spec)
        s = gen.gen_hermitian_over_self_adjoint(t, spec)
        if theorem_id == "2.5":
            return ck.check_lemma_2_5(t, s, seed=seed)
        return ck.check_corollary_3_2(t, s, seed=seed, n_x=N_X)
    if theorem_id == "3.1-lemma":
        out = _lemma_3_1(cfg, seed, index)
        if cfg.fuzz:
            t, s, _, b = out
            return ck.fuzz_conclusions(theorem_id, t, s, b)
        return out
    # 3.3 and 3.1-theorem
    t, pert = _perturbed(cfg, seed, index, None)
    if cfg.fuzz:
        return ck.fuzz_conclusions(theorem_id, t, pert.relation, pert.witness_b)
    check = ck.check_lemma_3_3 if theorem_id == "3.3" else ck.check_theorem_3_1
    return check(t, pert.relation, pert.witness_a, pert.witness_b, seed=seed, n_x=N_X)


def run_suite(cfg: SuiteConfig) -> SuiteResult:
    jobs = []
    for tid in cfg.theorems:
        jobs.extend((tid, seed, i) for i, seed in enumerate(instance_seeds(cfg.seed, tid, cfg.instances)))

    def work(job):
        return run_instance(*job, cfg)

    if cfg.workers == 1:
        outputs = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outputs = list(pool.map(work, jobs))

    result = SuiteResult(cfg)
    for tid in cfg.theorems:
        mine = [(job[1], out) for job, out in zip(jobs, outputs) if job[0] == tid]
        if cfg.fuzz:
            rep = FuzzReport(tid)
            for seed, violated in mine:
                rep.instances_run += 1
                for v in violated:
                    rep.violations.setdefault(v, []).append(seed)
        else:
            rep = ck.TheoremReport(tid)
            for _, r in mine:
                rep = rep.merge(r)
        result.reports.append(rep)
    return result


def _header(cfg: SuiteConfig) -> dict:
    return {
        "seed": cfg.seed,
        "instances": cfg.instances,
        "n_range": list(cfg.n_range),
        "dim_mul": cfg.dim_mul,
        "target_b": cfg.target_b,
        "fuzz": cfg.fuzz,
        "tol": {"rank_rel_tol": cfg.tol.rank_rel_tol, "angle_tol": cfg.tol.angle_tol},
    }


def render_json(result: SuiteResult) -> str:
    doc = {
        "config": _header(result.config),
        "ok": result.ok,
        "reports": [r.to_dict() for r in result.reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_text(result: SuiteResult) -> str:
    cfg = result.config
    lo, hi = cfg.n_range
    lines = [f"suite seed={cfg.seed} instances={cfg.instances} n={lo}..{hi}" + (" fuzz" if cfg.fuzz else "")]
    for rep in result.reports:
        if isinstance(rep, FuzzReport):
            lines.append(f"{rep.theorem_id}: {rep.instances_run} instances (hypotheses not enforced)")
            if not rep.violations:
                lines.append("  no conclusion violated")
            for name, seeds in sorted(rep.violations.items()):
                lines.append(f"  {name}: {len(seeds)}/{rep.instances_run}")
            continue
        status = "PASS" if rep.ok else "FAIL"
        lines.append(
            f"{rep.theorem_id}: {status} {rep.passes}/{rep.instances_run} passed, "
            f"{len(rep.failures)} failed, {len(rep.inapplicable)} inapplicable"
        )
        for seed, diag in rep.failures:
            lines.append(f"  failing seed {seed}: {diag}")
    lines.append("result: " + ("ok" if result.ok else "FAILED"))
    return "\n".join(lines) + "\n"
