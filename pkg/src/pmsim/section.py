"""Facets of the behavior cone cut down to the quantum moment subspace, and
the witness operators that certify every quantum moment vector lies inside.

Pipeline::

    basis, K = subspace_and_k()
    gens     = section_rays(behavior_matrix(), K)
    facets   = rays_to_facets(gens)
    ws       = witnesses(facets)
    report   = classify_witnesses(ws)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import dd
from .errors import ClassificationMismatch
from .exact import Matrix, bareiss_echelon, int_rank, is_psd, kernel_basis, mat_rank, primitive, real_part
from .parallel import pmap
from .quantum import build_square, contexts, operator_from_moments, projector, z_catalog

log = logging.getLogger(__name__)

DIM = 64  # homogenizing coordinate + 63 moments


@dataclass(frozen=True)
class SubspaceBasis:
    """Integer basis of the homogenized moment subspace: (1, 0) followed by
    (0, u_k) with u_k[j] = tr(O_k Z_j) / 4 for the nine observables O_k."""

    vectors: tuple

    @property
    def dim(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class ConeGenerators:
    rays: tuple          # primitive integer 64-tuples, sorted
    raw_count: int = 0   # extreme rays of the preimage cone before mapping

    def matrix(self) -> Matrix:
        return Matrix.from_cols(self.rays)


@dataclass(frozen=True)
class FacetSystem:
    """Rows ``b`` of B' with b[0] + sum_j b[j] q_j >= 0.

    ``rows`` holds the lifted facet inequalities and the +-K equality rows,
    all sorted together.  ``chart`` lists the coordinates used for the
    10-dimensional facet computation.
    """

    rows: tuple
    chart: tuple
    facet_count: int

    def evaluate(self, y) -> list:
        return [sum(a * b for a, b in zip(r, y) if a) for r in self.rows]


@dataclass
class WitnessOperator:
    row: int
    matrix: Matrix


@dataclass
class WitnessVerdict:
    row: int
    psd: bool
    rank: int
    rank_one_projector: bool
    context: str | None
    outcome: tuple | None = None


@dataclass
class SectionReport:
    ray_count: int
    facet_count: int
    row_count: int
    nonzero_witnesses: int
    verdicts: list = field(default_factory=list)

    @property
    def q_in_p(self) -> bool:
        return self.nonzero_witnesses > 0 and all(v.psd for v in self.verdicts)

    def per_context(self) -> dict:
        out = {c.name: 0 for c in contexts()}
        for v in self.verdicts:
            if v.context is not None:
                out[v.context] += 1
        return out


# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def subspace_and_k():
    """Basis of the 10-dim homogenized moment space and an integer matrix K
    (54 x 64) whose kernel is exactly that space."""
    sq = build_square()
    cat = z_catalog()
    vecs = [tuple([1] + [0] * 63)]
    for lab in sq:
        u = [Fraction(real_part((sq[lab] @ cat[j]).trace()), 4) for j in range(1, 64)]
        vecs.append(primitive([0] + u))
    basis = SubspaceBasis(tuple(vecs))
    assert int_rank([list(v) for v in vecs]) == 10
    k = kernel_basis(Matrix.from_rows(vecs)).transpose()
    assert k.shape == (54, DIM) and mat_rank(k) == 54
    return basis, k


def section_rays(a_rows, k: Matrix, *, cap: int | None = dd.DEFAULT_RAY_CAP,
                 ordering: str = "greedy") -> ConeGenerators:
    """Extreme rays of {A r : r >= 0, K A r = 0}.

    Double description runs on {r >= 0} cut by the rows of K A; the resulting
    rays are mapped through A, normalized, and pruned to the extreme ones.
    """
    a = Matrix.from_rows(a_rows)
    ka = k @ a
    pre = dd.orthant_section(ka.to_rows(), a.cols, cap=cap, ordering=ordering)
    log.info("preimage cone: %d extreme rays", len(pre))
    images = sorted({primitive(a.apply(r)) for r in pre})
    if any(not any(y) for y in images):
        raise AssertionError("a nonzero preimage ray mapped to zero")
    chart = _chart(images)
    local = [[y[i] for i in chart] for y in images]
    facets = dd.extreme_rays(local, len(chart), cap=cap)
    extreme = []
    for y, loc in zip(images, local):
        tight = [f for f in facets if _dot(f, loc) == 0]
        if tight and int_rank([list(f) for f in tight]) == len(chart) - 1:
            extreme.append(y)
    return ConeGenerators(tuple(sorted(extreme)), raw_count=len(pre))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b) if x and y)


def _chart(vectors) -> tuple:
    """First coordinates (in order) on which the span of ``vectors`` projects
    bijectively: the pivot columns of the row-stacked vectors."""
    _, piv = bareiss_echelon([list(v) for v in vectors])
    return tuple(piv)


def rays_to_facets(g: ConeGenerators, *, cap: int | None = dd.DEFAULT_RAY_CAP) -> FacetSystem:
    rays = list(g.rays)
    chart = _chart(rays)
    if len(chart) != 10:
        raise ValueError(f"generators span dimension {len(chart)}, expected 10")
    local = [[y[i] for i in chart] for y in rays]
    facets = dd.extreme_rays(local, len(chart), cap=cap)
    lifted = []
    for f in facets:
        row = [0] * DIM
        for c, v in zip(chart, f):
            row[c] = v
        lifted.append(tuple(row))
    _, k = subspace_and_k()
    eq = [tuple(r) for r in k.to_rows()]
    eq_rows = [primitive(r) for r in eq] + [primitive([-x for x in r]) for r in eq]
    rows = tuple(sorted(set(lifted) | set(eq_rows)))
    return FacetSystem(rows=rows, chart=chart, facet_count=len(lifted))


def facet_rays(f: FacetSystem) -> list:
    """Second double-description pass: generators of {y : B' y >= 0}, in the
    chart coordinates lifted back to 64 coordinates."""
    _, k = subspace_and_k()
    local = [[r[c] for c in f.chart] for r in f.rows if _row_is_facet(r, f.chart)]
    rays = dd.extreme_rays(local, len(f.chart))
    out = []
    for loc in rays:
        out.append(primitive(_lift_from_chart(loc, f.chart)))
    return sorted(out)


def _row_is_facet(row, chart) -> bool:
    return all(x == 0 for i, x in enumerate(row) if i not in chart) and any(row)


@lru_cache(maxsize=None)
def _chart_inverse(chart):
    basis, _ = subspace_and_k()
    # columns of the basis restricted to the chart form an invertible 10x10
    sub = Matrix.from_rows([[v[c] for v in basis.vectors] for c in chart])
    return basis, sub


def _lift_from_chart(loc, chart):
    """The unique point of the moment subspace with the given chart coordinates."""
    basis, sub = _chart_inverse(tuple(chart))
    # solve sub @ coeffs = loc
    aug = Matrix.from_rows([list(sub.row(i)) + [loc[i]] for i in range(sub.rows)])
    ker = kernel_basis(aug)
    assert ker.cols == 1
    col = ker.col(0)
    last = col[-1]
    coeffs = [Fraction(-c, last) for c in col[:-1]]
    return [sum(cf * v[i] for cf, v in zip(coeffs, basis.vectors)) for i in range(DIM)]


def witness_matrix(row) -> Matrix:
    """W with tr(rho W) = row[0] + sum_j row[j] tr(rho Z_j) for unit-trace rho."""
    return operator_from_moments(row[1:], row[0])


def witnesses(f: FacetSystem, include_zero: bool = False) -> list:
    """Witness operators of the facet rows.  Rows whose operator vanishes
    (the equality rows) are skipped unless ``include_zero``."""
    z_catalog()
    out = []
    for i, row in enumerate(f.rows):
        w = witness_matrix(row)
        if w.is_zero() and not include_zero:
            continue
        out.append(WitnessOperator(i, w))
    return out


@lru_cache(maxsize=1)
def joint_projectors() -> dict:
    """(context name, x, y) -> Pi_{x|X} Pi_{y|Y} for the first two members."""
    out = {}
    for ctx in contexts():
        x, y, _ = ctx.members
        for ox, oy in product((1, -1), repeat=2):
            out[ctx.name, ox, oy] = projector(x, ox) @ projector(y, oy)
    return out


def _inspect(m: Matrix):
    """(psd, rank, rank-one projector?, commuting contexts) of one witness."""
    sq = build_square()
    tr = m.trace()
    rank = mat_rank(m)
    rank_one = rank == 1 and real_part(tr) > 0 and m @ m == m.scale(tr)
    ctxs = [c.name for c in contexts() if all(m.commutes_with(sq[x]) for x in c.members)]
    return is_psd(m), rank, rank_one, ctxs


def classify_witnesses(ws, facet_count: int | None = None, ray_count: int = 0,
                       row_count: int = 0, jobs: int = 1) -> SectionReport:
    """Check every nonzero witness: PSD, rank one, commuting with exactly one
    context, proportional to one of that context's joint eigenprojectors.

    Raises ClassificationMismatch on any failure other than PSD (a non-PSD
    witness is reported through the verdict instead)."""
    projs = joint_projectors()
    report = SectionReport(ray_count=ray_count,
                           facet_count=facet_count if facet_count is not None else len(ws),
                           row_count=row_count, nonzero_witnesses=len(ws))
    seen = set()
    for w, (psd, rank, rank_one, ctxs) in zip(ws, pmap(_inspect, [w.matrix for w in ws], jobs)):
        m = w.matrix
        verdict = WitnessVerdict(w.row, psd, rank, rank_one, ctxs[0] if len(ctxs) == 1 else None)
        report.verdicts.append(verdict)
        if not psd:
            continue
        if not rank_one:
            raise ClassificationMismatch(f"witness for row {w.row} is not a rank-one multiple of a projector")
        if len(ctxs) != 1:
            raise ClassificationMismatch(f"witness for row {w.row} commutes with contexts {ctxs}")
        unit = m.scale(1 / real_part(m.trace()))
        match = [key for key, p in projs.items() if key[0] == ctxs[0] and p == unit]
        if len(match) != 1:
            raise ClassificationMismatch(f"witness for row {w.row} matches no joint eigenprojector")
        verdict.outcome = match[0][1:]
        if match[0] in seen:
            raise ClassificationMismatch(f"joint eigenprojector {match[0]} matched twice")
        seen.add(match[0])
    counts = report.per_context()
    if report.q_in_p and any(n != 4 for n in counts.values()):
        raise ClassificationMismatch(f"witnesses per context {counts}, expected 4 each")
    return report


def membership(q, f: FacetSystem) -> bool:
    """True iff (1, q) satisfies every row of the facet system."""
    q = tuple(q)
    if len(q) != 63:
        raise ValueError("moment vector must have 63 entries")
    y = (1,) + q
    return all(v >= 0 for v in f.evaluate(y))


@dataclass
class Section:
    basis: SubspaceBasis
    k: Matrix
    generators: ConeGenerators
    facets: FacetSystem
    witnesses: list
    report: SectionReport


def compute_section(*, cap: int | None = dd.DEFAULT_RAY_CAP, ordering: str = "greedy",
                    jobs: int = 1) -> Section:
    from .automata import behavior_matrix

    basis, k = subspace_and_k()
    gens = section_rays(behavior_matrix(), k, cap=cap, ordering=ordering)
    facets = rays_to_facets(gens, cap=cap)
    ws = witnesses(facets)
    report = classify_witnesses(ws, facet_count=facets.facet_count,
                                ray_count=len(gens.rays), row_count=len(facets.rows), jobs=jobs)
    return Section(basis, k, gens, facets, ws, report)


@lru_cache(maxsize=1)
def default_section() -> Section:
    return compute_section()
