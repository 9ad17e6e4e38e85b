# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels: candidate feasibility search with early exit."""
from libc.math cimport cos, sin, hypot, M_PI
from libc.stdlib cimport free, malloc


def sup_fourier_diff(double[::1] amps, double[::1] nodes,
                     double complex[::1] ref, double[::1] s_grid):
    """max_k | sum_j amps[j] exp(-2i*pi*nodes[j]*s_k) - ref[k] | for real amps."""
    cdef Py_ssize_t k, j
    cdef Py_ssize_t n_s = s_grid.shape[0]
    cdef Py_ssize_t d = nodes.shape[0]
    cdef double best = 0.0, re, im, ang, mag
    with nogil:
        for k in range(n_s):
            re = -ref[k].real
            im = -ref[k].imag
            for j in range(d):
                ang = -2.0 * M_PI * nodes[j] * s_grid[k]
                re += amps[j] * cos(ang)
                im += amps[j] * sin(ang)
            mag = hypot(re, im)
            if mag > best:
                best = mag
    return best


def feasible_scan(double[:, ::1] amp_combos, double[:, ::1] node_combos,
                  double complex[::1] ref, double[::1] s_grid, double eps_tol,
                  double[::1] amp_min, double[::1] amp_max,
                  double[::1] node_min, double[::1] node_max):
    """Scan candidate (amplitude, node) combinations for spectral feasibility.

    Same contract as pyscan.feasible_scan: fold coordinate extremes of
    feasible candidates into the min/max arrays in place, return the count.
    """
    cdef Py_ssize_t n_a = amp_combos.shape[0]
    cdef Py_ssize_t n_x = node_combos.shape[0]
    cdef Py_ssize_t n_s = s_grid.shape[0]
    cdef Py_ssize_t d = amp_combos.shape[1]
    cdef Py_ssize_t row, ia, k, j
    cdef double re, im, ang, a, v
    cdef double eps2 = eps_tol * eps_tol
    cdef long count = 0
    cdef bint ok
    cdef double *ere
    cdef double *eim
    if node_combos.shape[1] != d:
        raise ValueError("amp_combos and node_combos must share the coordinate count")
    if ref.shape[0] != n_s:
        raise ValueError("ref and s_grid must have equal length")
    ere = <double *> malloc(d * n_s * sizeof(double))
    eim = <double *> malloc(d * n_s * sizeof(double))
    if ere == NULL or eim == NULL:
        free(ere)
        free(eim)
        raise MemoryError()
    try:
        with nogil:
            for row in range(n_x):
                for j in range(d):
                    for k in range(n_s):
                        ang = -2.0 * M_PI * node_combos[row, j] * s_grid[k]
                        ere[j * n_s + k] = cos(ang)
                        eim[j * n_s + k] = sin(ang)
                for ia in range(n_a):
                    ok = True
                    for k in range(n_s):
                        re = -ref[k].real
                        im = -ref[k].imag
                        for j in range(d):
                            a = amp_combos[ia, j]
                            re += a * ere[j * n_s + k]
                            im += a * eim[j * n_s + k]
                        if re * re + im * im > eps2:
                            ok = False
                            break
                    if ok:
                        count += 1
                        for j in range(d):
                            a = amp_combos[ia, j]
                            if a < amp_min[j]:
                                amp_min[j] = a
                            if a > amp_max[j]:
                                amp_max[j] = a
                            v = node_combos[row, j]
                            if v < node_min[j]:
                                node_min[j] = v
                            if v > node_max[j]:
                                node_max[j] = v
    finally:
        free(ere)
        free(eim)
    return count
