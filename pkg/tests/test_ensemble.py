"""Ensemble LP, Farkas certificates and distribution-level verification."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmsim import automata as au
from pmsim import ensemble as en
from pmsim import quantum as qm
from pmsim.exact import GaussianRational, Matrix


def off_subspace_q():
    q = [Fraction(0)] * 63
    q[qm.moment_j("single", "A") - 1] = 1
    q[qm.moment_j("single", "B") - 1] = 1
    q[qm.moment_j("pair", "A", "B") - 1] = -1
    return q


def test_phase_one_small():
    # x1 + x2 = 1, x1 - x2 = 0  ->  x = (1/2, 1/2)
    out = en.find_ensemble([0], a_rows=((1, 1), (1, -1)))
    assert out.feasible
    assert out.ensemble.weights == {1: Fraction(1, 2), 2: Fraction(1, 2)}


def test_phase_one_infeasible_small():
    # x1 + x2 = 1 with x1 - x2 = 2 needs x2 < 0
    out = en.find_ensemble([2], a_rows=((1, 1), (1, -1)))
    assert not out.feasible
    assert en.check_farkas(out.farkas, [2], a_rows=((1, 1), (1, -1)))


def test_singlet_reference():
    ref = en.reconstruct_singlet_reference()
    # [PAPER] four behaviors, weight 1/4, initial state 2
    assert len(ref.support) == 4
    assert set(ref.weights.values()) == {Fraction(1, 4)}
    assert all(au.behavior(lam).s0 == 2 for lam in ref.support)
    assert ref.moments() == qm.q_vector(qm.singlet())
    assert en.verify_ensemble(ref, qm.singlet(), 3) is None


def test_singlet_and_mixed_feasible():
    for s in (qm.singlet(), qm.maximally_mixed()):
        out = en.find_ensemble(qm.q_vector(s))
        assert out.feasible
        assert out.ensemble.moments() == qm.q_vector(s)
        assert len(out.ensemble.support) <= 64
        assert en.verify_ensemble(out.ensemble, s, 3) is None


def test_off_subspace_infeasible():
    q = off_subspace_q()
    out = en.find_ensemble(q)
    assert not out.feasible
    assert en.check_farkas(out.farkas, q)


def test_uniform_ensemble_mismatch():
    uniform = en.Ensemble({lam: Fraction(1, 240) for lam in range(1, 241)})
    # [DERIVED] sign flips average <C> to 0 while the singlet has -1
    assert uniform.moments()[qm.moment_j("single", "C") - 1] == 0
    mm = en.verify_ensemble(uniform, qm.singlet(), 3)
    assert mm is not None
    assert mm.expected != mm.obtained


def test_ensemble_validation():
    with pytest.raises(ValueError):
        en.Ensemble({1: Fraction(1, 2)})
    with pytest.raises(ValueError):
        en.Ensemble({1: Fraction(3, 2), 2: Fraction(-1, 2)})
    with pytest.raises(ValueError):
        en.Ensemble({241: Fraction(1)})
    with pytest.raises(ValueError):
        en.verify_ensemble(en.reconstruct_singlet_reference(), qm.singlet(), 1)


@st.composite
def states(draw):
    ent = st.integers(-2, 2)
    g = Matrix.from_rows([[GaussianRational(draw(ent), draw(ent)) for _ in range(4)] for _ in range(4)])
    return qm.gram_state(g if not g.is_zero() else Matrix.identity(4))


@pytest.mark.slow
@settings(max_examples=8)
@given(states())
def test_random_states_reproduced(state):
    out = en.find_ensemble(qm.q_vector(state))
    assert out.feasible
    p = out.ensemble
    assert p.moments() == qm.q_vector(state)
    assert len(p.support) <= 64
    assert en.verify_ensemble(p, state, 3) is None


@settings(max_examples=25)
@given(st.lists(st.integers(0, 5), min_size=240, max_size=240).filter(any))
def test_mixtures_of_behaviors_are_feasible(ws):
    # any convex combination of columns of A must be found feasible
    total = sum(ws)
    p = en.Ensemble({lam: Fraction(w, total) for lam, w in enumerate(ws, start=1) if w})
    out = en.find_ensemble(p.moments())
    assert out.feasible
    assert out.ensemble.moments() == p.moments()
