"""Shared system builders for the test suite."""

import numpy as np

from locdamp.model import HyperbolicSystem

# Exact rational orthogonal matrix (columns have squared entries 4/9, 4/9,
# 1/9), used to manufacture full symmetric systems with chosen speeds.
SPEED_BASIS_3 = np.array(
    [[2.0, -2.0, 1.0], [2.0, 1.0, -2.0], [1.0, 2.0, 2.0]]
) / 3.0


def damped_wave_system() -> HyperbolicSystem:
    return HyperbolicSystem(
        a=np.array([[0.0, 1.0], [1.0, 0.0]]), n1=1, dd=np.array([[1.0]])
    )


def three_speed_system(speeds=(1.0, 2.0, 3.0), n1=1) -> HyperbolicSystem:
    """Dense symmetric system with the given three speeds, damping on the
    trailing components."""
    b = SPEED_BASIS_3
    a = b @ np.diag(np.asarray(speeds, dtype=float)) @ b.T
    a = 0.5 * (a + a.T)
    return HyperbolicSystem(a=a, n1=n1, dd=np.eye(3 - n1))


def _random_orthogonal(rng: np.random.Generator, k: int) -> np.ndarray:
    if k == 1:
        return np.array([[1.0]])
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def random_valid_system(
    rng: np.random.Generator, n: int | None = None, *, uncoupled: bool = False
) -> HyperbolicSystem:
    """Random admissible system; with ``uncoupled`` the velocity matrix is
    block diagonal so an eigenvector hides inside the damping kernel."""
    if n is None:
        n = int(rng.integers(2, 6))
    mags = 0.5 + np.cumsum(rng.uniform(0.2, 1.0, size=n))
    signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    lams = np.sort(mags * signs)
    if uncoupled:
        n1 = int(rng.integers(1, n))
    else:
        n1 = int(rng.integers(0, n))
    d = n - n1
    if uncoupled:
        a = np.zeros((n, n))
        q1 = _random_orthogonal(rng, n1)
        q2 = _random_orthogonal(rng, d)
        a[:n1, :n1] = q1 @ np.diag(lams[:n1]) @ q1.T
        a[n1:, n1:] = q2 @ np.diag(lams[n1:]) @ q2.T
    else:
        q = _random_orthogonal(rng, n)
        a = q @ np.diag(lams) @ q.T
    a = 0.5 * (a + a.T)
    g = rng.standard_normal((d, d))
    dd = g @ g.T + (0.3 + rng.random()) * np.eye(d)
    if rng.random() < 0.3:
        k = rng.standard_normal((d, d))
        dd = dd + 0.2 * (k - k.T)
    return HyperbolicSystem(a=a, n1=n1, dd=dd)
