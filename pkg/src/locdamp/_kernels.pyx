# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel: masked half-relaxation, integer-cell shifts,
edge guard.  Mirrors ``_kernels_py.advance`` exactly; the test suite holds
the two byte-close."""

from libc.math cimport fabs


cdef inline void _half_damp(double[:, ::1] v, double[:, ::1] e,
                            unsigned char[::1] mask,
                            Py_ssize_t n, Py_ssize_t m) noexcept:
    cdef Py_ssize_t j, r, c
    cdef double acc
    cdef double tmp[16]
    for j in range(m):
        if mask[j]:
            for r in range(n):
                acc = 0.0
                for c in range(n):
                    acc += e[r, c] * v[c, j]
                tmp[r] = acc
            for r in range(n):
                v[r, j] = tmp[r]


def advance(double[:, ::1] v, long long[::1] shifts, double[:, ::1] damp_half,
            unsigned char[::1] mask, int n_steps, int apply_damping,
            int guard_cells, double guard_tol):
    """Run ``n_steps`` split steps in place.

    Each step is half-relax (masked cells only), per-row shift by a whole
    number of cells with zero inflow, an edge-band guard, then the second
    half-relax.  Returns 0 on completion or the 1-based step index at
    which the guard detected mass within ``guard_cells`` of either edge.
    """
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m = v.shape[1]
    cdef Py_ssize_t i, j, j0
    cdef long long s, k
    cdef int step
    if n > 16:
        raise ValueError("advance: at most 16 components supported")

    for step in range(n_steps):
        if apply_damping:
            _half_damp(v, damp_half, mask, n, m)

        for i in range(n):
            s = shifts[i]
            if s > 0:
                for j in range(m - 1, s - 1, -1):
                    v[i, j] = v[i, j - s]
                k = s if s < m else m
                for j in range(k):
                    v[i, j] = 0.0
            elif s < 0:
                k = -s
                for j in range(m - k):
                    v[i, j] = v[i, j + k]
                j0 = m - k
                if j0 < 0:
                    j0 = 0
                for j in range(j0, m):
                    v[i, j] = 0.0

        k = guard_cells if guard_cells < m else m
        for i in range(n):
            for j in range(k):
                if fabs(v[i, j]) > guard_tol or fabs(v[i, m - 1 - j]) > guard_tol:
                    return step + 1

        if apply_damping:
            _half_damp(v, damp_half, mask, n, m)
    return 0
