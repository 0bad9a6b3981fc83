"""Hot integer kernels over Z/2^w, each with a numba and a numpy implementation.

All matrices are ``uint64``; every result is masked to ``width`` bits.  The
public functions dispatch on :func:`bitcong._accel.backend` at call time, so
tests and the benchmark can flip backends without reimporting.
"""

import numpy as np

from . import _accel
from ._accel import njit

_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def mask_for(width):
    if not 1 <= width <= 64:
        raise ValueError(f"width must be in 1..64, got {width}")
    return _ALL_ONES if width == 64 else np.uint64((1 << width) - 1)


def to_u64(values):
    """``uint64`` array of ``values``, taking negative integers modulo 2^64."""
    try:
        return np.asarray(values, dtype=np.uint64)
    except OverflowError:
        obj = np.asarray(values, dtype=object)
        return np.asarray(obj % (1 << 64), dtype=object).astype(np.uint64)


def as_matrix(rows, ncols):
    a = to_u64(rows)
    if a.size == 0:
        return np.zeros((0, ncols), dtype=np.uint64)
    return a.reshape(-1, ncols)


# ---------------------------------------------------------------------------
# numba kernels


@njit
def _ctz_nb(x):
    v = 0
    one = np.uint64(1)
    while (x & one) == 0:
        x = x >> one
        v += 1
    return v


@njit
def _odd_inverse_nb(u):
    two = np.uint64(2)
    inv = u
    for _ in range(5):
        inv = inv * (two - u * inv)
    return inv


@njit
def _howell_nb(a, width, mask):
    m, n = a.shape
    buf = np.zeros((m + n + 1, n), dtype=np.uint64)
    for i in range(m):
        for j in range(n):
            buf[i, j] = a[i, j] & mask
    rows = m
    r = 0
    pivcol = np.empty(n, dtype=np.int64)
    pivval = np.empty(n, dtype=np.int64)
    for j in range(n):
        best = -1
        bestv = width
        for i in range(r, rows):
            x = buf[i, j]
            if x != 0:
                v = _ctz_nb(x)
                if v < bestv:
                    bestv = v
                    best = i
        if best < 0:
            continue
        if best != r:
            for k in range(n):
                t = buf[r, k]
                buf[r, k] = buf[best, k]
                buf[best, k] = t
        sh = np.uint64(bestv)
        inv = _odd_inverse_nb(buf[r, j] >> sh)
        for k in range(n):
            buf[r, k] = (buf[r, k] * inv) & mask
        for i in range(r + 1, rows):
            x = buf[i, j]
            if x != 0:
                q = x >> sh
                for k in range(j, n):
                    buf[i, k] = (buf[i, k] - q * buf[r, k]) & mask
        if bestv > 0:
            up = np.uint64(width - bestv)
            nz = False
            for k in range(j + 1, n):
                buf[rows, k] = (buf[r, k] << up) & mask
                if buf[rows, k] != 0:
                    nz = True
            for k in range(0, j + 1):
                buf[rows, k] = 0
            if nz:
                rows += 1
        pivcol[r] = j
        pivval[r] = bestv
        r += 1
    for p in range(r):
        j = pivcol[p]
        sh = np.uint64(pivval[p])
        for i in range(p):
            q = buf[i, j] >> sh
            if q != 0:
                for k in range(j, n):
                    buf[i, k] = (buf[i, k] - q * buf[p, k]) & mask
    return buf[:r].copy()


@njit
def _reduce_nb(h, x, width, mask):
    out = x & mask
    r, n = h.shape
    for p in range(r):
        j = 0
        while h[p, j] == 0:
            j += 1
        sh = np.uint64(_ctz_nb(h[p, j]))
        q = out[j] >> sh
        if q != 0:
            for k in range(j, n):
                out[k] = (out[k] - q * h[p, k]) & mask
    return out


@njit
def _rows_hold_nb(coeffs, rhs, points, mask):
    k = points.shape[0]
    m, n = coeffs.shape
    res = np.ones(k, dtype=np.bool_)
    for t in range(k):
        for i in range(m):
            acc = np.uint64(0)
            for j in range(n):
                acc += coeffs[i, j] * points[t, j]
            if (acc & mask) != rhs[i]:
                res[t] = False
                break
    return res


@njit
def _cnf_eval_nb(lits, offsets, assignments):
    k = assignments.shape[0]
    nclauses = offsets.shape[0] - 1
    res = np.ones(k, dtype=np.bool_)
    for t in range(k):
        for c in range(nclauses):
            sat = False
            for p in range(offsets[c], offsets[c + 1]):
                lit = lits[p]
                if lit > 0:
                    if assignments[t, lit] != 0:
                        sat = True
                        break
                elif assignments[t, -lit] == 0:
                    sat = True
                    break
            if not sat:
                res[t] = False
                break
    return res


# ---------------------------------------------------------------------------
# numpy fallbacks


def _lowbit_exponent(x):
    # x nonzero uint64 array -> 2-adic valuation per entry
    low = x & (~x + np.uint64(1))
    return np.log2(low.astype(np.float64)).astype(np.int64)


def _howell_np(a, width, mask):
    m, n = a.shape
    buf = np.zeros((m + n + 1, n), dtype=np.uint64)
    buf[:m] = a & mask
    rows, r = m, 0
    pivots = []
    for j in range(n):
        col = buf[r:rows, j]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        vals = _lowbit_exponent(col[nz])
        best = r + int(nz[np.argmin(vals)])
        v = int(vals.min())
        if best != r:
            buf[[r, best]] = buf[[best, r]]
        u = int(buf[r, j]) >> v
        inv = np.uint64(pow(u, -1, 1 << width))
        buf[r] = (buf[r] * inv) & mask
        if rows > r + 1:
            q = buf[r + 1:rows, j] >> np.uint64(v)
            buf[r + 1:rows] = (buf[r + 1:rows] - q[:, None] * buf[r]) & mask
        if v > 0:
            closure = (buf[r] << np.uint64(width - v)) & mask
            closure[: j + 1] = 0
            if closure.any():
                buf[rows] = closure
                rows += 1
        pivots.append((j, v))
        r += 1
    for p, (j, v) in enumerate(pivots):
        if p:
            q = buf[:p, j] >> np.uint64(v)
            buf[:p] = (buf[:p] - q[:, None] * buf[p]) & mask
    return buf[:r].copy()


def _reduce_np(h, x, width, mask):
    out = x & mask
    for row in h:
        j = int(np.flatnonzero(row)[0])
        v = (int(row[j]) & -int(row[j])).bit_length() - 1
        q = out[j] >> np.uint64(v)
        if q:
            out = (out - q * row) & mask
    return out


def _rows_hold_np(coeffs, rhs, points, mask):
    if coeffs.shape[0] == 0:
        return np.ones(points.shape[0], dtype=bool)
    sums = (points @ coeffs.T) & mask
    return np.all(sums == rhs[None, :], axis=1)


def _cnf_eval_np(lits, offsets, assignments):
    k = assignments.shape[0]
    res = np.ones(k, dtype=bool)
    vals = assignments.astype(bool)
    for c in range(offsets.shape[0] - 1):
        clause = lits[offsets[c]:offsets[c + 1]]
        if clause.size == 0:
            return np.zeros(k, dtype=bool)
        pos = clause[clause > 0]
        neg = -clause[clause < 0]
        sat = vals[:, pos].any(axis=1) | (~vals[:, neg]).any(axis=1)
        res &= sat
    return res


# ---------------------------------------------------------------------------
# dispatch


def howell(a, width):
    """Howell normal form of the row span of ``a`` over Z/2^width.

    Pivots are powers of two, entries above each pivot are reduced below it,
    and the row set is closed so that the rows with pivot at or after column j
    span every span vector that is zero before column j.  Zero rows are dropped.
    """
    a = np.ascontiguousarray(a, dtype=np.uint64)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    mask = mask_for(width)
    if a.shape[1] == 0:
        return np.zeros((0, 0), dtype=np.uint64)
    if _accel.USE_NUMBA:
        return _howell_nb(a, width, mask)
    return _howell_np(a, width, mask)


def reduce(h, x, width):
    """Remainder of ``x`` after top-down reduction by a Howell matrix ``h``.

    The remainder is zero iff ``x`` lies in the row span of ``h``.
    """
    h = np.ascontiguousarray(h, dtype=np.uint64)
    x = np.array(x, dtype=np.uint64)
    mask = mask_for(width)
    if h.shape[0] == 0:
        return x & mask
    if _accel.USE_NUMBA:
        return _reduce_nb(h, x, width, mask)
    return _reduce_np(h, x, width, mask)


def rows_hold(coeffs, rhs, points, width):
    """For each point (row of ``points``), whether every congruence row holds."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.uint64)
    rhs = np.ascontiguousarray(rhs, dtype=np.uint64)
    points = np.ascontiguousarray(points, dtype=np.uint64)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    mask = mask_for(width)
    if _accel.USE_NUMBA:
        return _rows_hold_nb(coeffs, rhs & mask, points, mask)
    return _rows_hold_np(coeffs, rhs & mask, points, mask)


def flatten_clauses(clauses):
    offsets = np.zeros(len(clauses) + 1, dtype=np.int64)
    np.cumsum([len(c) for c in clauses], out=offsets[1:])
    lits = np.fromiter((l for c in clauses for l in c), dtype=np.int64, count=int(offsets[-1]))
    return lits, offsets


def cnf_eval(clauses, assignments):
    """Evaluate a clause list under many assignments at once.

    ``assignments`` is ``(k, num_vars + 1)`` with column 0 unused, so a
    variable's index addresses its column directly.
    """
    lits, offsets = flatten_clauses(clauses)
    assignments = np.ascontiguousarray(assignments, dtype=np.uint8)
    if assignments.ndim == 1:
        assignments = assignments.reshape(1, -1)
    if _accel.USE_NUMBA:
        return _cnf_eval_nb(lits, offsets, assignments)
    return _cnf_eval_np(lits, offsets, assignments)
