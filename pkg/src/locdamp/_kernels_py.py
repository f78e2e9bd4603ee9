"""Pure-Python twin of the compiled stepping kernel.

Same contract as ``_kernels.advance``: mutate the state in place for
``n_steps`` split steps and return 0, or the 1-based step index at which
mass reached the edge guard band.  Kept in lockstep with the compiled
version by the backend-equivalence tests.
"""

from __future__ import annotations

import numpy as np


def advance(
    v: np.ndarray,
    shifts: np.ndarray,
    damp_half: np.ndarray,
    mask: np.ndarray,
    n_steps: int,
    apply_damping: int,
    guard_cells: int,
    guard_tol: float,
) -> int:
    n, m = v.shape
    if n > 16:
        raise ValueError("advance: at most 16 components supported")
    active = mask.astype(bool)
    guard = min(int(guard_cells), m)

    def half_damp() -> None:
        v[:, active] = damp_half @ v[:, active]

    for step in range(int(n_steps)):
        if apply_damping:
            half_damp()

        for i in range(n):
            s = int(shifts[i])
            if s == 0:
                continue
            if abs(s) >= m:
                v[i, :] = 0.0
                continue
            v[i, :] = np.roll(v[i, :], s)
            if s > 0:
                v[i, :s] = 0.0
            else:
                v[i, s:] = 0.0

        if guard > 0:
            band = np.abs(np.concatenate([v[:, :guard], v[:, m - guard:]], axis=1))
            if band.max() > guard_tol:
                return step + 1

        if apply_damping:
            half_damp()
    return 0
