# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: constrained pattern enumeration and Voronoi assignment.

Mirrors ``_kernels_py`` argument for argument.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

MODE_COUNT = 0
MODE_ENUM = 1
MODE_EXISTS = 2


cdef inline bint _bsearch(const int64_t[:] codes, Py_ssize_t lo, Py_ssize_t hi, int64_t key) nogil:
    cdef Py_ssize_t mid
    cdef int64_t c
    while lo < hi:
        mid = (lo + hi) >> 1
        c = codes[mid]
        if c == key:
            return True
        if c < key:
            lo = mid + 1
        else:
            hi = mid
    return False


def backtrack(Py_ssize_t ncells, int q, domains, trig_ptr, trig_plc, plc_ptr,
              plc_cells, plc_set, set_ptr, set_codes, int mode, long long limit):
    cdef const int64_t[:] dom = np.ascontiguousarray(domains, dtype=np.int64)
    cdef const int64_t[:] tptr = np.ascontiguousarray(trig_ptr, dtype=np.int64)
    cdef const int64_t[:] tplc = np.ascontiguousarray(trig_plc, dtype=np.int64)
    cdef const int64_t[:] pptr = np.ascontiguousarray(plc_ptr, dtype=np.int64)
    cdef const int64_t[:] pcells = np.ascontiguousarray(plc_cells, dtype=np.int64)
    cdef const int64_t[:] pset = np.ascontiguousarray(plc_set, dtype=np.int64)
    cdef const int64_t[:] sptr = np.ascontiguousarray(set_ptr, dtype=np.int64)
    cdef const int64_t[:] scodes = np.ascontiguousarray(set_codes, dtype=np.int64)

    if ncells == 0:
        if mode == MODE_ENUM:
            return 1, np.zeros((1, 0), dtype=np.int8)
        return 1, np.zeros((0, 0), dtype=np.int8)

    cdef cnp.ndarray[cnp.int8_t, ndim=2] rows
    cdef Py_ssize_t cap = 0, nrows = 0
    if mode == MODE_ENUM:
        cap = 64
        rows = np.empty((cap, ncells), dtype=np.int8)
    else:
        rows = np.zeros((0, ncells), dtype=np.int8)

    cdef int64_t[:] val = np.full(ncells, -1, dtype=np.int64)
    cdef long long count = 0
    cdef Py_ssize_t pos = 0, t, j, p, s, i
    cdef int64_t v, d, code, mul
    cdef bint ok
    while pos >= 0:
        v = val[pos] + 1
        d = dom[pos]
        while v < q and not ((d >> v) & 1):
            v += 1
        if v >= q:
            val[pos] = -1
            pos -= 1
            continue
        val[pos] = v
        ok = True
        for t in range(tptr[pos], tptr[pos + 1]):
            p = tplc[t]
            code = 0
            mul = 1
            for j in range(pptr[p], pptr[p + 1]):
                code += val[pcells[j]] * mul
                mul *= q
            s = pset[p]
            if _bsearch(scodes, sptr[s], sptr[s + 1], code):
                ok = False
                break
        if not ok:
            continue
        if pos == ncells - 1:
            count += 1
            if mode == MODE_ENUM:
                if nrows == cap:
                    cap *= 2
                    rows = np.resize(rows, (cap, ncells))
                for i in range(ncells):
                    rows[nrows, i] = <cnp.int8_t>val[i]
                nrows += 1
            if mode == MODE_EXISTS or (limit > 0 and count >= limit):
                break
        else:
            pos += 1
            val[pos] = -1
    if mode == MODE_ENUM:
        return count, np.array(rows[:nrows], copy=True)
    return count, rows


cdef inline int _cmp_plus_one(long long a, long long b) nogil:
    cdef long long c, lhs, rhs
    if b <= a:
        return 1
    c = b - a - 1
    if c < 0:
        return 1
    lhs = 4 * a
    rhs = c * c
    return (lhs > rhs) - (lhs < rhs)


cdef inline int _metric_cmp(long long a, int da, long long b, int db) nogil:
    if da == db:
        return (a > b) - (a < b)
    if da == 1:
        return _cmp_plus_one(a, b)
    return -_cmp_plus_one(b, a)


def voronoi_assign(sites, centers, int rank, moduli, long long r2):
    """Arrays are 2-D int64 with one row per site / center."""
    cdef const int64_t[:, :] S = np.ascontiguousarray(sites, dtype=np.int64)
    cdef const int64_t[:, :] C = np.ascontiguousarray(centers, dtype=np.int64)
    cdef const int64_t[:] M = np.ascontiguousarray(list(moduli) or [1], dtype=np.int64)
    cdef Py_ssize_t n = S.shape[0], m = C.shape[0], k = S.shape[1]
    out_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[:] out = out_arr
    if m == 0 or n == 0:
        return out_arr
    cdef Py_ssize_t i, j, a, best
    cdef long long sq, bsq, dd, x, y
    cdef int dl, bdel, cmp, kc
    cdef bint same
    for i in range(n):
        best = -1
        bsq = 0
        bdel = 0
        for j in range(m):
            sq = 0
            for a in range(rank):
                dd = S[i, a] - C[j, a]
                sq += dd * dd
            same = True
            for a in range(k):
                if S[i, a] != C[j, a]:
                    same = False
                    break
            dl = 0 if same else 1
            if best < 0:
                cmp = -1
            else:
                cmp = _metric_cmp(sq, dl, bsq, bdel)
            if cmp == 0:
                # compare (s - C[j]) with (s - C[best]) in tuple order
                kc = 0
                for a in range(k):
                    x = S[i, a] - C[j, a]
                    y = S[i, a] - C[best, a]
                    if a >= rank:
                        x = x % M[a - rank]
                        y = y % M[a - rank]
                        if x < 0:
                            x += M[a - rank]
                        if y < 0:
                            y += M[a - rank]
                    if x != y:
                        kc = -1 if x < y else 1
                        break
                if kc < 0:
                    best = j
                    bsq = sq
                    bdel = dl
            elif cmp < 0:
                best = j
                bsq = sq
                bdel = dl
        if bsq <= r2:
            out[i] = best
    return out_arr
