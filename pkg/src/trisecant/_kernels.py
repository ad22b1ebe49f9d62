"""Lattice-sum kernels for theta series.

Both back ends evaluate, for each query point ``z_q``,

    sum_n  prod_j (2 pi i (n, d_j))**e_j  *  exp(2 pi i (n, z_q) + pi i (n, B n))

over ``n = m + eps`` with ``m`` running through a fixed list of integer offsets
around the per-query lattice centre, restricted to the truncation ellipsoid.
The sum for each fixed-size chunk of offsets is returned separately so that
the caller can reduce chunks in a fixed order regardless of how the work was
split across threads.  Each term is scaled by ``exp(-shift_q)`` where
``shift_q`` is the largest real exponent seen for that query.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit

TWO_PI_I = 2j * np.pi


@njit(cache=True, nogil=True)
def _shifts_numba(offsets, centers, cvec, eps, z, B, ypi, r2):
    Q = z.shape[0]
    P, g = offsets.shape
    shifts = np.full(Q, -np.inf)
    for q in range(Q):
        for p in range(P):
            # ellipsoid test on m - c
            quad = 0.0
            for i in range(g):
                wi = offsets[p, i] + centers[q, i] - cvec[q, i]
                for j in range(g):
                    wj = offsets[p, j] + centers[q, j] - cvec[q, j]
                    quad += wi * ypi[i, j] * wj
            if quad > r2:
                continue
            re = 0.0
            for i in range(g):
                ni = offsets[p, i] + centers[q, i] + eps[i]
                re += -2.0 * np.pi * ni * z[q, i].imag
                for j in range(g):
                    nj = offsets[p, j] + centers[q, j] + eps[j]
                    re += -np.pi * ni * B[i, j].imag * nj
            if re > shifts[q]:
                shifts[q] = re
    return shifts


@njit(cache=True, nogil=True)
def _chunk_sums_numba(offsets, centers, cvec, eps, z, B, ypi, r2, dirs, monos,
                      shifts, chunk, c0, c1, out):
    """Kahan-summed chunk partials for chunks ``c0 <= c < c1``, all queries."""
    Q = z.shape[0]
    P, g = offsets.shape
    k = dirs.shape[0]
    M = monos.shape[0]
    n = np.empty(g)
    lin = np.empty(k, dtype=np.complex128)
    comp = np.empty(M, dtype=np.complex128)
    for q in range(Q):
        for c in range(c0, c1):
            for mm in range(M):
                out[q, c, mm] = 0.0
                comp[mm] = 0.0
            stop = min((c + 1) * chunk, P)
            for p in range(c * chunk, stop):
                quad = 0.0
                for i in range(g):
                    wi = offsets[p, i] + centers[q, i] - cvec[q, i]
                    for j in range(g):
                        wj = offsets[p, j] + centers[q, j] - cvec[q, j]
                        quad += wi * ypi[i, j] * wj
                if quad > r2:
                    continue
                for i in range(g):
                    n[i] = offsets[p, i] + centers[q, i] + eps[i]
                ex = 0.0 + 0.0j
                for i in range(g):
                    ex += 2j * np.pi * n[i] * z[q, i]
                    for j in range(g):
                        ex += 1j * np.pi * n[i] * B[i, j] * n[j]
                term = np.exp(ex - shifts[q])
                for j in range(k):
                    s = 0.0 + 0.0j
                    for i in range(g):
                        s += n[i] * dirs[j, i]
                    lin[j] = 2j * np.pi * s
                for mm in range(M):
                    f = term
                    for j in range(k):
                        for _ in range(monos[mm, j]):
                            f *= lin[j]
                    # compensated accumulation
                    y = f - comp[mm]
                    t = out[q, c, mm] + y
                    comp[mm] = (t - out[q, c, mm]) - y
                    out[q, c, mm] = t
    return out


def _mask_numpy(offsets, center, cvec, ypi, r2):
    w = offsets + (center - cvec)
    quad = np.einsum("pi,ij,pj->p", w, ypi, w)
    return quad <= r2


def _shifts_numpy(offsets, centers, cvec, eps, z, B, ypi, r2):
    Q = z.shape[0]
    shifts = np.full(Q, -np.inf)
    for q in range(Q):
        keep = _mask_numpy(offsets, centers[q], cvec[q], ypi, r2)
        n = offsets[keep] + centers[q] + eps
        re = -2.0 * np.pi * (n @ z[q].imag) - np.pi * np.einsum("pi,ij,pj->p", n, B.imag, n)
        if re.size:
            shifts[q] = re.max()
    return shifts


def _chunk_sums_numpy(offsets, centers, cvec, eps, z, B, ypi, r2, dirs, monos,
                      shifts, chunk, c0, c1, out):
    P = offsets.shape[0]
    for q in range(z.shape[0]):
        lo, hi = c0 * chunk, min(c1 * chunk, P)
        offs = offsets[lo:hi]
        keep = _mask_numpy(offs, centers[q], cvec[q], ypi, r2)
        n = offs + centers[q] + eps
        ex = TWO_PI_I * (n @ z[q]) + 1j * np.pi * np.einsum("pi,ij,pj->p", n, B, n)
        term = np.where(keep, np.exp(ex - shifts[q]), 0.0)
        lin = TWO_PI_I * (n @ dirs.T)
        factors = np.ones((n.shape[0], monos.shape[0]), dtype=np.complex128)
        for mm in range(monos.shape[0]):
            for j in range(dirs.shape[0]):
                for _ in range(monos[mm, j]):
                    factors[:, mm] *= lin[:, j]
        terms = term[:, None] * factors
        for c in range(c0, c1):
            a, b = c * chunk - lo, min((c + 1) * chunk, P) - lo
            out[q, c, :] = terms[a:b].sum(axis=0)
    return out


if HAVE_NUMBA:
    lattice_shifts = _shifts_numba
    chunk_sums = _chunk_sums_numba
else:
    lattice_shifts = _shifts_numpy
    chunk_sums = _chunk_sums_numpy

# the pure-numpy pair stays importable for the benchmark and for cross-checks
numpy_lattice_shifts = _shifts_numpy
numpy_chunk_sums = _chunk_sums_numpy
