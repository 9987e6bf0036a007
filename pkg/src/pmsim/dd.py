"""Exact double description on integer data.

Two entry points:

* :func:`orthant_section` -- extreme rays of {r >= 0 : H r = 0}, built by
  cutting the nonnegative orthant with one hyperplane at a time.
* :func:`extreme_rays` -- extreme rays of a pointed cone {x : a_i . x >= 0},
  built from a simplicial starting cone by adding one halfspace at a time.

Rays are primitive integer tuples.  Adjacency of two rays is decided by the
algebraic rank test on the constraints tight at both, after a cheap
counting filter.
"""

from __future__ import annotations

import logging
from math import gcd
from functools import reduce

from .errors import DDOverflow
from .exact import Matrix, int_rank, kernel_basis

log = logging.getLogger(__name__)

DEFAULT_RAY_CAP = 1_000_000


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b) if x and y)


def _prim(v) -> tuple:
    g = reduce(gcd, v, 0)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def _support(v) -> int:
    mask = 0
    for i, x in enumerate(v):
        if x:
            mask |= 1 << i
    return mask


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _popcount(mask) -> int:
    return bin(mask).count("1")


def _check_cap(n, cap):
    if cap is not None and n > cap:
        raise DDOverflow(f"intermediate ray count {n} exceeds cap {cap}")


def orthant_section(hyperplanes, n: int, *, cap: int | None = DEFAULT_RAY_CAP,
                    ordering: str = "greedy") -> list:
    """Extreme rays of {r in R^n : r >= 0, h . r = 0 for every h}.

    ``ordering`` is ``"greedy"`` (next hyperplane = the one producing the
    fewest positive/negative ray pairs) or ``"given"`` (input order).  The
    returned list is sorted lexicographically.
    """
    hyperplanes = [tuple(int(x) for x in h) for h in hyperplanes]
    if any(len(h) != n for h in hyperplanes):
        raise ValueError("hyperplane length mismatch")
    # Rays carry (vector, support mask).
    rays = [(tuple(1 if i == k else 0 for i in range(n)), 1 << k) for k in range(n)]
    _check_cap(len(rays), cap)
    inserted = []          # hyperplanes applied so far (independent ones)
    pending = list(hyperplanes)
    step = 0
    while pending:
        vals_by_h = []
        for h in pending:
            vals = [_dot(h, r) for r, _ in rays]
            npos = sum(1 for v in vals if v > 0)
            nneg = sum(1 for v in vals if v < 0)
            vals_by_h.append((npos * nneg, npos + nneg, vals, h))
        # drop hyperplanes already implied by the current cone
        live = [t for t in vals_by_h if t[1] > 0]
        if not live:
            break
        if ordering == "greedy":
            pick = min(range(len(live)), key=lambda i: (live[i][0], live[i][1]))
        elif ordering == "given":
            pick = 0
        else:
            raise ValueError(f"unknown ordering {ordering!r}")
        _, _, vals, h = live[pick]
        pending = [t[3] for i, t in enumerate(live) if i != pick]
        inserted.append(h)
        rays = _cut_hyperplane(rays, vals, inserted, cap)
        step += 1
        log.debug("orthant_section step %d: %d rays", step, len(rays))
    return sorted(r for r, _ in rays)


def _cut_hyperplane(rays, vals, inserted, cap):
    # every inserted hyperplane cut at least one ray, so they are independent
    k = len(inserted) - 1
    zero = [rays[i] for i, v in enumerate(vals) if v == 0]
    pos = [(rays[i], v) for i, v in enumerate(vals) if v > 0]
    neg = [(rays[i], v) for i, v in enumerate(vals) if v < 0]
    prev = inserted[:-1]
    # Before the cut the cone lives in R^n with k independent equalities; two
    # extreme rays are adjacent iff the face spanned by their joint support
    # S has dimension 2, i.e. rank(H_S) = |S| - 2.
    max_union = k + 2
    cache = {}
    new = list(zero)
    for (p, pm), pv in pos:
        for (q, qm), qv in neg:
            union = pm | qm
            size = _popcount(union)
            if size > max_union:
                continue
            adj = cache.get(union)
            if adj is None:
                adj = _adjacent_orthant(union, size, prev)
                cache[union] = adj
            if not adj:
                continue
            v = _prim([pv * b - qv * a for a, b in zip(p, q)])
            new.append((v, _support(v)))
            _check_cap(len(new), cap)
    return new


def _adjacent_orthant(union, size, prev):
    if not prev:
        return size == 2
    cols = list(_bits(union))
    sub = [[h[c] for c in cols] for h in prev]
    return int_rank(sub) == size - 2


# ---------------------------------------------------------------------------
# halfspace form
# ---------------------------------------------------------------------------

def extreme_rays(inequalities, dim: int, *, cap: int | None = DEFAULT_RAY_CAP) -> list:
    """Extreme rays of the pointed cone {x in R^dim : a . x >= 0 for all a}.

    The cone must be pointed (the inequality rows span R^dim); otherwise
    ValueError is raised.  Output is sorted lexicographically.
    """
    rows = [tuple(int(x) for x in a) for a in inequalities]
    rows = [a for a in rows if any(a)]
    if any(len(a) != dim for a in rows):
        raise ValueError("inequality length mismatch")
    # pick dim independent rows greedily for the simplicial start
    basis_idx = []
    for i, a in enumerate(rows):
        if int_rank([list(rows[j]) for j in basis_idx] + [list(a)]) > len(basis_idx):
            basis_idx.append(i)
            if len(basis_idx) == dim:
                break
    if len(basis_idx) < dim:
        raise ValueError("cone is not pointed: inequalities do not span the space")
    start = [rows[i] for i in basis_idx]
    # rays of {x : S x >= 0} are the columns of S^{-1}: the ray for row i is
    # the kernel of the other rows, oriented so that row i is positive.
    rays = []
    for i in range(dim):
        others = Matrix.from_rows([start[j] for j in range(dim) if j != i])
        k = kernel_basis(others) if dim > 1 else Matrix.identity(1)
        v = tuple(k.col(0))
        if _dot(start[i], v) < 0:
            v = tuple(-x for x in v)
        rays.append(v)
    added = list(start)
    rest = [a for i, a in enumerate(rows) if i not in set(basis_idx)]
    for a in rest:
        rays = _cut_halfspace(rays, a, added, dim, cap)
        added.append(a)
    return sorted(set(rays))


def _cut_halfspace(rays, a, added, dim, cap):
    vals = [_dot(a, r) for r in rays]
    if all(v >= 0 for v in vals):
        return rays
    tight = [frozenset(i for i, h in enumerate(added) if _dot(h, r) == 0) for r in rays]
    keep = [r for r, v in zip(rays, vals) if v >= 0]
    pos = [i for i, v in enumerate(vals) if v > 0]
    neg = [i for i, v in enumerate(vals) if v < 0]
    new = list(keep)
    for i in pos:
        for j in neg:
            common = tight[i] & tight[j]
            if len(common) < dim - 2:
                continue
            # algebraic test: tight constraints of the pair span dim-2
            if int_rank([list(added[c]) for c in common]) != dim - 2:
                continue
            v = _prim([vals[i] * y - vals[j] * x for x, y in zip(rays[i], rays[j])])
            new.append(v)
            _check_cap(len(new), cap)
    return new
