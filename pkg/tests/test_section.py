"""Moment subspace, section cone, facets and witness operators."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmsim import automata as au
from pmsim import ensemble as en
from pmsim import quantum as qm
from pmsim import section as se
from pmsim.errors import DDOverflow
from pmsim.exact import GaussianRational, Matrix, int_rank, is_psd, mat_rank

pytestmark = pytest.mark.slow


def off_subspace_q():
    q = [Fraction(0)] * 63
    q[qm.moment_j("single", "A") - 1] = 1
    q[qm.moment_j("single", "B") - 1] = 1
    q[qm.moment_j("pair", "A", "B") - 1] = -1
    return q


def test_subspace_and_k():
    basis, k = se.subspace_and_k()
    assert basis.dim == 10
    assert k.shape == (54, 64)
    assert mat_rank(k) + basis.dim == 64
    e0 = (1,) + (0,) * 63
    assert all(x == 0 for x in k.apply(e0))
    for v in basis.vectors:
        assert all(x == 0 for x in k.apply(v))


def test_quantum_moments_in_subspace():
    _, k = se.subspace_and_k()
    for s in (qm.singlet(), qm.basis_state(2), qm.maximally_mixed()):
        assert all(x == 0 for x in k.apply((1,) + qm.q_vector(s)))


def test_behavior_matrix_rank():
    # regression constant from exact elimination (cross-checked with sympy)
    a = au.behavior_matrix()
    assert int_rank([list(r) for r in a]) == 28


def test_section_rays(section):
    _, k = se.subspace_and_k()
    rays = section.generators.rays
    assert len(rays) == 120
    assert int_rank([list(r) for r in rays]) == 10
    for y in rays:
        assert all(x == 0 for x in k.apply(y))


def test_singlet_in_section_cone(section):
    # [DERIVED] LP over the section rays, normalized to first entry 1
    cols = [[Fraction(x, y[0]) for x in y] for y in section.generators.rays]
    rows = tuple(zip(*cols))
    out = en.find_ensemble(qm.q_vector(qm.singlet()), a_rows=rows)
    assert out.feasible


def test_facets_valid_and_tight(section):
    f = section.facets
    assert f.facet_count == 24
    assert len(f.rows) == 132
    rays = section.generators.rays
    for row in f.rows:
        tight = [y for y in rays if sum(a * b for a, b in zip(row, y)) == 0]
        assert all(sum(a * b for a, b in zip(row, y)) >= 0 for y in rays)
        if se._row_is_facet(row, f.chart):
            assert int_rank([list(y) for y in tight]) == 9


def test_round_trip(section):
    assert se.facet_rays(section.facets) == sorted(section.generators.rays)


def test_witness_counts(section):
    ws = section.witnesses
    assert len(ws) == 24
    allw = se.witnesses(section.facets, include_zero=True)
    assert len(allw) == 132
    assert sum(w.matrix.is_zero() for w in allw) == 108
    assert section.report.per_context() == {c.name: 4 for c in qm.contexts()}
    assert section.report.q_in_p


def test_witnesses_are_projectors(section):
    rho = qm.singlet().rho
    for w in section.witnesses:
        m = w.matrix
        assert is_psd(m)
        assert m @ m == m.scale(m.trace())
        assert mat_rank(m) == 1
        assert (rho @ m).trace() >= 0


@st.composite
def states(draw):
    ent = st.integers(-2, 2)
    g = Matrix.from_rows([[GaussianRational(draw(ent), draw(ent)) for _ in range(4)] for _ in range(4)])
    return qm.gram_state(g if not g.is_zero() else Matrix.identity(4))


@settings(max_examples=20)
@given(states())
def test_witness_trace_identity(section, state):
    # tr(rho W) equals the facet functional on (1, q(rho))
    y = (1,) + qm.q_vector(state)
    vals = section.facets.evaluate(y)
    for w in section.witnesses:
        assert (state.rho @ w.matrix).trace() == vals[w.row]
    assert se.membership(qm.q_vector(state), section.facets)


def test_membership_examples(section):
    f = section.facets
    assert se.membership(qm.q_vector(qm.singlet()), f)
    assert se.membership((0,) * 63, f)
    assert not se.membership(off_subspace_q(), f)
    with pytest.raises(ValueError):
        se.membership((0,) * 62, f)


def test_ray_cap_overflow():
    with pytest.raises(DDOverflow):
        se.compute_section(cap=1)
