"""Pure-Python versions of the hot loops in ``_kernels.pyx``.

Both modules expose the same functions with the same argument layout; see
:mod:`subshift.kernels` for how one of them is picked.
"""
import numpy as np

MODE_COUNT = 0
MODE_ENUM = 1
MODE_EXISTS = 2


def _bsearch(codes, lo, hi, key):
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


def backtrack(ncells, q, domains, trig_ptr, trig_plc, plc_ptr, plc_cells,
              plc_set, set_ptr, set_codes, mode, limit):
    """Depth-first enumeration of assignments avoiding forbidden codes.

    Cells are assigned in index order. Placement ``p`` covers the cells
    ``plc_cells[plc_ptr[p]:plc_ptr[p+1]]`` and is checked once its last
    cell is assigned; its code ``sum(val_j * q**j)`` must not occur in the
    sorted slice of ``set_codes`` belonging to ``plc_set[p]``.

    Returns ``(count, rows)`` where ``rows`` holds the assignments found in
    enumeration mode (an empty array otherwise).
    """
    domains = [int(x) for x in domains]
    trig_ptr = [int(x) for x in trig_ptr]
    trig_plc = [int(x) for x in trig_plc]
    plc_ptr = [int(x) for x in plc_ptr]
    plc_cells = [int(x) for x in plc_cells]
    plc_set = [int(x) for x in plc_set]
    set_ptr = [int(x) for x in set_ptr]
    set_codes = [int(x) for x in set_codes]
    rows = []
    if ncells == 0:
        if mode == MODE_ENUM:
            return 1, np.zeros((1, 0), dtype=np.int8)
        return 1, np.zeros((0, 0), dtype=np.int8)
    val = [-1] * ncells
    count = 0
    pos = 0
    while pos >= 0:
        v = val[pos] + 1
        dom = domains[pos]
        while v < q and not (dom >> v) & 1:
            v += 1
        if v >= q:
            val[pos] = -1
            pos -= 1
            continue
        val[pos] = v
        ok = True
        for t in range(trig_ptr[pos], trig_ptr[pos + 1]):
            p = trig_plc[t]
            code = 0
            mul = 1
            for j in range(plc_ptr[p], plc_ptr[p + 1]):
                code += val[plc_cells[j]] * mul
                mul *= q
            s = plc_set[p]
            if _bsearch(set_codes, set_ptr[s], set_ptr[s + 1], code):
                ok = False
                break
        if not ok:
            continue
        if pos == ncells - 1:
            count += 1
            if mode == MODE_ENUM:
                rows.append(list(val))
            if mode == MODE_EXISTS or (limit > 0 and count >= limit):
                break
        else:
            pos += 1
            val[pos] = -1
    if mode == MODE_ENUM:
        arr = np.array(rows, dtype=np.int8).reshape(len(rows), ncells)
        return count, arr
    return count, np.zeros((0, ncells), dtype=np.int8)


def voronoi_assign(sites, centers, rank, moduli, r2):
    """Disjointified truncated Voronoi assignment.

    For every site, pick the minimizer of sqrt(free distance^2) + delta,
    break ties by the least (site - center) in tuple order (torsion
    coordinates reduced), and keep it only if the free squared distance is
    at most ``r2``. Returns the winning center index or -1 per site.
    """
    sites = np.asarray(sites, dtype=np.int64)
    centers = np.asarray(centers, dtype=np.int64)
    moduli = [int(m) for m in moduli]
    n, k = sites.shape if sites.ndim == 2 else (0, 0)
    out = np.full(n, -1, dtype=np.int64)
    m = centers.shape[0]
    if m == 0:
        return out
    S = sites.tolist()
    Cs = centers.tolist()
    for i in range(n):
        s = S[i]
        best = -1
        bsq = 0
        bdel = 0
        bkey = None
        for j in range(m):
            c = Cs[j]
            sq = 0
            for a in range(rank):
                dd = s[a] - c[a]
                sq += dd * dd
            dl = 0 if s == c else 1
            if best < 0:
                cmp = -1
            else:
                cmp = _metric_cmp(sq, dl, bsq, bdel)
            if cmp == 0:
                key = _diff_key(s, c, rank, moduli)
                if key < bkey:
                    best, bsq, bdel, bkey = j, sq, dl, key
            elif cmp < 0:
                best, bsq, bdel = j, sq, dl
                bkey = _diff_key(s, c, rank, moduli)
        if bsq <= r2:
            out[i] = best
    return out


def _diff_key(s, c, rank, moduli):
    key = [s[a] - c[a] for a in range(rank)]
    for t, mm in enumerate(moduli):
        key.append((s[rank + t] - c[rank + t]) % mm)
    return key


def _cmp_plus_one(a, b):
    if b <= a:
        return 1
    c = b - a - 1
    if c < 0:
        return 1
    lhs = 4 * a
    rhs = c * c
    return (lhs > rhs) - (lhs < rhs)


def _metric_cmp(a, da, b, db):
    if da == db:
        return (a > b) - (a < b)
    if da == 1:
        return _cmp_plus_one(a, b)
    return -_cmp_plus_one(b, a)
