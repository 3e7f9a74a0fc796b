"""Command-line interface: ``relcalc {generate,check,bounds,suite}``.

Exit codes: 0 success, 1 a theorem check failed, 2 usage or input error,
3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import instance_io
from .bounds import bound_curve
from .deficiency import deficiency_pair, lower_bound_constant
from .errors import NumericalError, RelcalcError
from .harness import checkers, generators as gen, suite
from .instance_io import Instance
from .quotient import relation_norm
from .relation import Relation, components, is_hermitian, is_self_adjoint
from .subspace import DEFAULT_TOL, TolerancePolicy

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "RELCALC_SEED"
KINDS = ("self-adjoint", "hermitian", "relation", "pair")


class UsageError(RelcalcError):
    pass


def _seed(value) -> int:
    if value is None:
        value = os.environ.get(SEED_ENV)
        if value is None:
            raise UsageError(f"a seed is required: pass --seed or set {SEED_ENV}")
    try:
        seed = int(value)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("seed must lie in [0, 2^64)")
    return seed


def _n_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise UsageError(f"--n expects N or LO..HI, got {text!r}") from None


def _tol(args) -> TolerancePolicy:
    return TolerancePolicy(
        args.tol_rank if args.tol_rank is not None else DEFAULT_TOL.rank_rel_tol,
        args.tol_angle if args.tol_angle is not None else DEFAULT_TOL.angle_tol,
    )


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _load(args) -> Instance:
    try:
        inst = instance_io.load(args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    if args.tol_rank is not None or args.tol_angle is not None:
        tol = _tol(args)
        inst.tol = tol
        inst.relations = {k: Relation(r.graph.with_tol(tol)) for k, r in inst.relations.items()}
    return inst


# generate ------------------------------------------------------------------

def cmd_generate(args) -> int:
    tol = _tol(args)
    spec = gen.InstanceSpec(args.n, args.dim_mul, args.dim_dom, _seed(args.seed), args.target_b, tol)
    witness = None
    if args.kind == "self-adjoint":
        rels = {"T": gen.gen_self_adjoint(spec)}
    elif args.kind == "hermitian":
        rels = {"T": gen.gen_hermitian(spec)}
    elif args.kind == "relation":
        rels = {"T": gen.gen_relation(spec)}
    else:
        t = gen.gen_hermitian(spec)
        pert = gen.gen_perturbation(t, spec)
        rels = {"T": t, "S": pert.relation}
        witness = {"a": pert.witness_a, "b": pert.witness_b}
    _emit(instance_io.dumps(Instance(args.n, rels, tol, witness)), args.output)
    return EXIT_OK


# check ---------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, tuple):
        return "(" + ", ".join(str(x) for x in v) + ")"
    return repr(v) if isinstance(v, float) else str(v)


def _summary(r: Relation) -> dict:
    parts = components(r)
    herm = is_hermitian(r)
    out = {
        "dim": r.dim,
        "domain_dim": parts.domain.dim,
        "range_dim": parts.range.dim,
        "mul_dim": parts.mul_part.dim,
        "kernel_dim": parts.kernel.dim,
        "hermitian": herm,
        "self_adjoint": is_self_adjoint(r),
        "norm": relation_norm(r),
        "lower_bound": lower_bound_constant(r),
    }
    if herm:
        out["deficiency"] = tuple(deficiency_pair(r))
    return out


def _pair_checks(inst: Instance) -> list:
    t, s = inst.relations["T"], inst.relations["S"]
    reps = [checkers.check_lemma_2_5(t, s), checkers.check_corollary_3_2(t, s)]
    if inst.witness and {"a", "b"} <= inst.witness.keys():
        a, b = inst.witness["a"], inst.witness["b"]
        reps += [checkers.check_lemma_3_3(t, s, a, b), checkers.check_theorem_3_1(t, s, a, b)]
    return reps


def cmd_check(args) -> int:
    inst = _load(args)
    summaries = {name: _summary(r) for name, r in inst.relations.items()}
    reports = _pair_checks(inst) if {"T", "S"} <= inst.relations.keys() else []
    failed = any(not r.ok for r in reports)
    if args.format == "json":
        def clean(d):
            return {k: (None if isinstance(v, float) and math.isinf(v) else list(v) if isinstance(v, tuple) else v)
                    for k, v in d.items()}

        doc = {"relations": {k: clean(v) for k, v in summaries.items()}, "checks": [r.to_dict() for r in reports]}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        lines = []
        for name, summ in summaries.items():
            lines.append(f"relation {name} (n={inst.space_dim})")
            lines += [f"  {k}: {_fmt(v)}" for k, v in summ.items()]
        for rep in reports:
            if rep.inapplicable:
                lines.append(f"check {rep.theorem_id}: inapplicable ({rep.inapplicable[0][1]})")
            else:
                status = "pass" if rep.ok else "FAIL: " + rep.failures[0][1]
                lines.append(f"check {rep.theorem_id}: {status}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_FAIL if failed else EXIT_OK


# bounds --------------------------------------------------------------------

def _grid(text):
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--a-grid expects comma-separated numbers, got {text!r}") from None


def cmd_bounds(args) -> int:
    inst = _load(args)
    try:
        s, t = inst.relations[args.s], inst.relations[args.t]
    except KeyError as exc:
        raise UsageError(f"instance has no relation named {exc.args[0]!r}") from None
    seed = _seed(args.seed) if args.seed is not None or SEED_ENV in os.environ else 0
    report = bound_curve(s, t, _grid(args.a_grid), seed=seed, workers=args.workers,
                         n_samples=args.samples, a_prime=args.a_prime)
    if args.format == "csv":
        text = report.to_csv()
    elif args.format == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        lines = [f"pure relative bound: {_fmt(report.pure_b)}", f"T-bound estimate: {_fmt(report.t_bound)}"]
        if report.quadratic is not None:
            lines.append(f"quadratic bound at a'={report.quadratic[0]!r}: {_fmt(report.quadratic[1])}")
        lines.append(f"{'a':>24} {'b_certified':>24} {'b_sampled':>24}")
        lines += [f"{p.a!r:>24} {_fmt(p.b_certified):>24} {_fmt(p.b_sampled):>24}" for p in report.curve]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


# suite ---------------------------------------------------------------------

def cmd_suite(args) -> int:
    names = [x.strip() for group in (args.theorem or []) for x in group.split(",") if x.strip()]
    cfg = suite.SuiteConfig(
        theorems=suite.resolve_theorems(names, args.fuzz),
        instances=args.instances,
        seed=_seed(args.seed),
        n_range=_n_range(args.n),
        dim_mul=args.dim_mul,
        target_b=args.target_b,
        workers=args.workers,
        fuzz=args.fuzz,
        tol=_tol(args),
    )
    result = suite.run_suite(cfg)
    render = suite.render_json if args.format == "json" else suite.render_text
    _emit(render(result), args.output)
    return EXIT_OK if result.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, help="relative rank tolerance (default 1e-10)")
    common.add_argument("--tol-angle", type=float, help="containment angle tolerance (default 1e-8)")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")

    p = argparse.ArgumentParser(prog="relcalc", description="Linear relations on C^n and perturbation checks.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a random instance as JSON")
    g.add_argument("--kind", choices=KINDS, default="self-adjoint")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--dim-mul", type=int, default=0)
    g.add_argument("--dim-dom", type=int)
    g.add_argument("--target-b", type=float, default=0.5)
    g.add_argument("--seed")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", parents=[common], help="report structural properties of an instance")
    c.add_argument("--input", "-i", required=True)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bounds", parents=[common], help="relative bound curve of S with respect to T")
    b.add_argument("--input", "-i", required=True)
    b.add_argument("--s", default="S", help="name of the perturbation relation")
    b.add_argument("--t", default="T", help="name of the reference relation")
    b.add_argument("--a-grid", help="comma-separated ascending a values")
    b.add_argument("--a-prime", type=float, help="also report the quadratic bound at this a'")
    b.add_argument("--samples", type=int, help="sphere samples per a (default 10 r^2)")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--seed")
    b.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("suite", parents=[common], help="run theorem checkers on random instances")
    s.add_argument("--theorem", action="append",
                   help=f"one of {', '.join(suite.THEOREM_IDS)} (3.1 means 3.1-theorem); repeatable; default all")
    s.add_argument("--instances", type=int, default=100)
    s.add_argument("--seed")
    s.add_argument("--n", default="2..6", help="space dimension N or range LO..HI")
    s.add_argument("--dim-mul", type=int)
    s.add_argument("--target-b", type=float)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--fuzz", action="store_true", help="drop the b < 1 hypothesis and only count violations")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"relcalc: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RelcalcError, ValueError) as exc:
        print(f"relcalc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
