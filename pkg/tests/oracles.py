"""Reference computations that avoid the library's own code paths.

Everything here goes through scipy.linalg (null_space, orth,
subspace_angles) or plain normal equations, so agreement with relcalc is
evidence rather than tautology.
"""

import numpy as np
import scipy.linalg as sla


def orth(mat, rcond=1e-10):
    mat = np.asarray(mat, dtype=complex)
    if mat.shape[1] == 0 or not np.any(mat):
        return np.zeros((mat.shape[0], 0), dtype=complex)
    return sla.orth(mat, rcond=rcond)


def max_angle(a, b):
    """Largest principal angle between two column spans of equal dimension."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[1] != b.shape[1]:
        return np.inf
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(sla.subspace_angles(a, b)))


def same_span(a, b, tol=1e-8):
    return max_angle(a, b) < tol


def adjoint_by_definition(graph, n):
    """Solve <g, x_k> = <y, f_k> for every graph basis pair, over unknowns (y, g)."""
    graph = np.asarray(graph, dtype=complex)
    if graph.shape[1] == 0:
        return np.eye(2 * n, dtype=complex)
    x, f = graph[:n], graph[n:]
    # <u, v> = v^H u, so the condition reads x_k^H g - f_k^H y = 0
    rows = np.hstack([-f.conj().T, x.conj().T])
    return sla.null_space(rows, rcond=1e-10)


def matrix_graph(a):
    a = np.asarray(a, dtype=complex)
    return orth(np.vstack([np.eye(a.shape[0]), a]))


def mul_part(graph, n):
    """{f : (0, f) in T} via the null space of the x-block."""
    graph = np.asarray(graph, dtype=complex)
    if graph.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    null = sla.null_space(graph[:n], rcond=1e-10)
    return orth(graph[n:] @ null)


def domain(graph, n):
    return orth(np.asarray(graph)[:n])


def distance_to_span(v, basis):
    """||v - P v|| by least squares on the (not necessarily orthonormal) basis."""
    if basis.shape[1] == 0:
        return float(np.linalg.norm(v))
    coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
    return float(np.linalg.norm(v - basis @ coef))


def random_graph(rng, n, kind=None):
    """Random spanning set for a relation on C^n with assorted structure."""
    kind = kind or rng.choice(["generic", "operator", "multivalued", "degenerate", "real"])
    k = int(rng.integers(0, 2 * n + 1))
    g = rng.standard_normal((2 * n, k)) + 1j * rng.standard_normal((2 * n, k))
    if kind == "operator":
        d = int(rng.integers(0, n + 1))
        x = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = np.vstack([x, a @ x])
    elif kind == "multivalued" and k:
        g[:n, : max(1, k // 2)] = 0
    elif kind == "degenerate" and k > 1:
        g[:, -1] = g[:, 0] * (2 - 1j)
    elif kind == "real":
        g = g.real.astype(complex)
    return g
