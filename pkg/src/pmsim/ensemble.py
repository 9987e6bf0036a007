"""Exact mixtures of behaviors that reproduce quantum moments.

find_ensemble solves {p >= 0 : A p = (1, q)} with a phase-1 simplex over the
rationals (Bland's rule).  Infeasibility comes back as a Farkas vector y with
y^T A >= 0 and y . (1, q) < 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .automata import _run, behavior, behavior_matrix
from .errors import ReferenceNotInFamily
from .exact import Matrix, _integer_rows, bareiss_echelon, kernel_basis, mat_rank
from .quantum import QuantumState, contexts, sequence_distributions

# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ensemble:
    """Probability weights over behaviors; absent lambdas have weight 0."""

    weights: dict

    def __post_init__(self):
        for lam, w in self.weights.items():
            if not 1 <= lam <= 240:
                raise ValueError(f"lambda {lam} out of range")
            if w < 0:
                raise ValueError(f"negative weight {w} for lambda {lam}")
        if sum(self.weights.values(), Fraction(0)) != 1:
            raise ValueError("weights do not sum to 1")

    @property
    def support(self) -> list:
        return sorted(lam for lam, w in self.weights.items() if w)

    def moments(self) -> tuple:
        """A p, dropping the leading normalization entry."""
        a = behavior_matrix()
        return tuple(sum((row[lam - 1] * w for lam, w in self.weights.items()), Fraction(0))
                     for row in a[1:])


@dataclass(frozen=True)
class Feasible:
    ensemble: Ensemble
    feasible = True


@dataclass(frozen=True)
class Infeasible:
    farkas: tuple
    feasible = False


def check_farkas(y, q, a_rows=None) -> bool:
    """y^T A >= 0 componentwise and y . (1, q) < 0."""
    a_rows = behavior_matrix() if a_rows is None else a_rows
    b = (1,) + tuple(q)
    if any(sum(yi * row[c] for yi, row in zip(y, a_rows) if yi) < 0
           for c in range(len(a_rows[0]))):
        return False
    return sum(yi * bi for yi, bi in zip(y, b)) < 0


# ---------------------------------------------------------------------------
# simplex
# ---------------------------------------------------------------------------

def _independent_rows(a_rows) -> list:
    # scaling a column of A by its denominator leaves row dependencies alone
    _, piv = bareiss_echelon(_integer_rows(zip(*a_rows)))
    return piv


def find_ensemble(q, a_rows=None):
    """Feasible(Ensemble) or Infeasible(farkas) for the moment vector ``q``."""
    a_rows = behavior_matrix() if a_rows is None else a_rows
    q = tuple(Fraction(x) for x in q)
    if len(q) != len(a_rows) - 1:
        raise ValueError(f"expected {len(a_rows) - 1} moments, got {len(q)}")
    b = (Fraction(1),) + q
    ncols = len(a_rows[0])

    # An inconsistent system is certified by a left-kernel vector of A.
    aug = [list(r) + [x] for r, x in zip(a_rows, b)]
    keep = _independent_rows(a_rows)
    if mat_rank(Matrix.from_rows(aug)) > len(keep):
        left = kernel_basis(Matrix.from_cols(a_rows))  # columns y with y^T A = 0
        for k in range(left.cols):
            y = left.col(k)
            yb = sum(yi * bi for yi, bi in zip(y, b))
            if yb:
                y = tuple(-yi if yb > 0 else yi for yi in y)
                return Infeasible(tuple(Fraction(x) for x in y))
        raise AssertionError("inconsistent system without a separating left-kernel vector")

    # Duplicate columns carry no information; keep the first lambda of each.
    first = {}
    for c in range(ncols):
        col = tuple(a_rows[r][c] for r in keep)
        first.setdefault(col, c)
    cols = sorted(first.values())

    rows = [[Fraction(a_rows[r][c]) for c in cols] for r in keep]
    rhs = [b[r] for r in keep]
    signs = [1 if x >= 0 else -1 for x in rhs]
    rows = [[s * x for x in row] for s, row in zip(signs, rows)]
    rhs = [s * x for s, x in zip(signs, rhs)]
    values, basis, duals, obj = _phase_one(rows, rhs)
    if obj > 0:
        y = [Fraction(0)] * len(a_rows)
        for i, r in enumerate(keep):
            y[r] = -duals[i] * signs[i]
        return Infeasible(tuple(y))
    weights = {}
    n = len(cols)
    for i, var in enumerate(basis):
        if var < n and values[i]:
            weights[cols[var] + 1] = values[i]
    return Feasible(Ensemble(weights))


def _phase_one(rows, rhs):
    """Minimize the sum of artificials for rows x + a = rhs, x, a >= 0.

    Returns basic values, basis indices, simplex multipliers and the optimal
    objective.  Bland's rule: lowest-index entering column with negative
    reduced cost, ties in the ratio test broken by lowest basic index.
    """
    m, n = len(rows), len(rows[0])
    t = [row + [Fraction(1 if i == k else 0) for k in range(m)] for i, row in enumerate(rows)]
    rhs = list(rhs)
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    while True:
        # reduced costs d_j = c_j - c_B . column_j
        cb = [cost[v] for v in basis]
        enter = None
        for j in range(n + m):
            if j in basis:
                continue
            d = cost[j] - sum(c * t[i][j] for i, c in enumerate(cb) if c and t[i][j])
            if d < 0:
                enter = j
                break
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = t[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise AssertionError("phase-one problem is bounded below; unbounded ray impossible")
        _pivot(t, rhs, leave, enter)
        basis[leave] = enter
    cb = [cost[v] for v in basis]
    obj = sum((c * x for c, x in zip(cb, rhs)), Fraction(0))
    duals = [sum((cb[k] * t[k][n + i] for k in range(m)), Fraction(0)) for i in range(m)]
    return rhs, basis, duals, obj


def _pivot(t, rhs, r, c):
    piv = t[r][c]
    row = [x / piv for x in t[r]]
    t[r] = row
    rhs[r] = rhs[r] / piv
    for i in range(len(t)):
        if i == r:
            continue
        f = t[i][c]
        if f:
            ti = t[i]
            for j, x in enumerate(row):
                if x:
                    ti[j] -= f * x
            rhs[i] -= f * rhs[r]


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mismatch:
    context: str
    inputs: tuple
    outputs: tuple
    expected: Fraction
    obtained: Fraction

    def __str__(self):
        return (f"context {self.context}: P({','.join(f'{o:+d}' for o in self.outputs)}"
                f" | {','.join(self.inputs)}) quantum {self.expected} vs ensemble {self.obtained}")


def ensemble_distributions(p: Ensemble, members, depth: int) -> dict:
    """inputs -> {outputs: probability} for all sequences over ``members``."""
    out = {}
    for n in range(1, depth + 1):
        for ins in product(members, repeat=n):
            dist = {}
            for lam in p.support:
                b = behavior(lam)
                key = _run(b.automaton, b.s0, ins)
                dist[key] = dist.get(key, Fraction(0)) + p.weights[lam]
            out[ins] = dist
    return out


def verify_ensemble(p: Ensemble, state: QuantumState, depth: int = 3):
    """None when every compatible sequence of length <= depth has identical
    quantum and ensemble outcome distributions, else the first Mismatch."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    for ctx in contexts():
        quantum = sequence_distributions(state, ctx.members, depth)
        classical = ensemble_distributions(p, ctx.members, depth)
        for ins, qdist in quantum.items():
            cdist = classical[ins]
            for outs in product((1, -1), repeat=len(ins)):
                e = qdist.get(outs, Fraction(0))
                o = cdist.get(outs, Fraction(0))
                if e != o:
                    return Mismatch(ctx.name, ins, outs, e, o)
    return None


# ---------------------------------------------------------------------------
# the published singlet ensemble
# ---------------------------------------------------------------------------

P, M = 1, -1

SINGLET_TABLES = (
    ([[M, P, M], [M, M, P], [P, M, M]],
     [[M, P, M], [P, M, M], [M, P, M]],
     [[M, M, P], [M, M, P], [M, P, M]]),
    ([[M, P, M], [P, P, P], [M, P, M]],
     [[M, P, M], [M, P, M], [P, M, M]],
     [[M, M, P], [P, P, P], [P, M, M]]),
    ([[P, M, M], [M, M, P], [M, P, M]],
     [[P, M, M], [P, M, M], [P, M, M]],
     [[P, P, P], [M, M, P], [P, M, M]]),
    ([[P, M, M], [P, P, P], [P, M, M]],
     [[P, M, M], [M, P, M], [M, P, M]],
     [[P, P, P], [P, P, P], [M, P, M]]),
)


def reconstruct_singlet_reference(s0: int = 2) -> Ensemble:
    """Locate the four behaviors whose output tables are the published
    singlet tables (initial state 2) and weight each 1/4."""
    from .automata import enumerate_behaviors

    found = []
    for k, tables in enumerate(SINGLET_TABLES, start=1):
        want = tuple(tuple(x for row in g for x in row) for g in tables)
        hits = [b for b in enumerate_behaviors() if b.s0 == s0 and b.automaton.outputs == want]
        if len(hits) != 1:
            raise ReferenceNotInFamily(
                f"singlet table set {k} matched {len(hits)} behaviors with s0={s0}")
        found.append(hits[0].lam)
    return Ensemble({lam: Fraction(1, 4) for lam in found})
