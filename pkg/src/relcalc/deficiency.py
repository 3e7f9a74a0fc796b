"""Deficiency spaces and indices, and lower-bound constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, PreconditionError
from .quotient import single_valued_part
from .relation import Relation, components, is_hermitian, shift
from .subspace import Subspace, complement, numerical_rank

__all__ = [
    "DeficiencyRecord",
    "DeficiencyPair",
    "UPPER_SAMPLES",
    "LOWER_SAMPLES",
    "deficiency_index",
    "deficiency_pair",
    "lower_bound_constant",
]

UPPER_SAMPLES = (1j, 2j, 1 + 1j)
LOWER_SAMPLES = (-1j, -2j, 1 - 1j)


@dataclass(frozen=True)
class DeficiencyRecord:
    lam: complex
    space: Subspace
    index: int


class DeficiencyPair(NamedTuple):
    d_plus: int
    d_minus: int


def deficiency_index(t: Relation, lam) -> DeficiencyRecord:
    """R(T - lam I)^⊥ and its dimension."""
    lam = complex(lam)
    rng = components(shift(t, lam)).range
    space = complement(rng)
    return DeficiencyRecord(lam, space, space.dim)


def deficiency_pair(t: Relation) -> DeficiencyPair:
    """(d_+(T), d_-(T)) for a Hermitian relation.

    Each index is sampled at three points of its half-plane; a disagreement
    raises :class:`NumericalError` since the indices are constant there.
    """
    if not is_hermitian(t):
        raise PreconditionError("deficiency indices are defined for Hermitian relations")
    pair = []
    for samples in (UPPER_SAMPLES, LOWER_SAMPLES):
        idx = {lam: deficiency_index(t, lam).index for lam in samples}
        if len(set(idx.values())) != 1:
            raise NumericalError(f"deficiency index not constant on half-plane: {idx}")
        pair.append(idx[samples[0]])
    return DeficiencyPair(*pair)


def lower_bound_constant(t: Relation) -> float:
    """Largest c >= 0 with ||T(x)|| >= c ||x|| on D(T).

    Returns ``math.inf`` when D(T) = {0}, where every c qualifies.  A
    smallest singular value below the rank cutoff is reported as exactly 0.
    """
    m = single_valued_part(t).matrix
    r = m.shape[1]
    if r == 0:
        return math.inf
    s = np.linalg.svd(m, compute_uv=False)
    if s.size < r:
        return 0.0
    if numerical_rank(s, t.tol, scale=1.0) < r:
        return 0.0
    return float(s[-1])
