"""Shared generators for the seeded property loops."""

import numpy as np

from qrelax.system import LinearSystem


def random_consistent(rng, n, cond=None):
    """Invertible n x n system with a known solution (b = A x_true).

    With ``cond`` set, the spectrum is controlled through an SVD-style
    construction so iterative runs converge in a predictable number of
    sweeps.
    """
    if cond is None:
        a = rng.normal(size=(n, n))
    else:
        q1, _ = np.linalg.qr(rng.normal(size=(n, n)))
        q2, _ = np.linalg.qr(rng.normal(size=(n, n)))
        a = q1 @ np.diag(np.geomspace(1.0, 1.0 / cond, n)) @ q2.T
    x_true = rng.normal(size=n)
    return LinearSystem(a, a @ x_true), x_true


def random_unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def unit_residual_system(rng, n, x0):
    """Consistent system whose residual at x0 has exactly unit norm,
    so the column algorithm runs with embedding factor 1."""
    a = rng.normal(size=(n, n))
    norms = np.linalg.norm(a, axis=0)
    a = a / norms[None, :]
    u = random_unit(rng, n)
    return LinearSystem(a, a @ x0 + u)
