"""Exact arithmetic.  Oracles: sympy for rank/charpoly, brute force for PSD."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pmsim.errors import NotHermitian
from pmsim.exact import (
    I,
    GaussianRational,
    Matrix,
    bareiss_echelon,
    char_poly,
    gauss_json,
    int_rank,
    is_psd,
    kernel_basis,
    mat_rank,
    parse_gauss,
    parse_rat,
    primitive,
    rat_str,
)

small = st.integers(-5, 5)
fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def int_matrices(max_r=5, max_c=6):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@st.composite
def hermitian(draw, n=None):
    n = n or draw(st.integers(1, 4))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = draw(fracs)
        for j in range(i + 1, n):
            z = GaussianRational(draw(fracs), draw(fracs))
            rows[i][j], rows[j][i] = z, z.conjugate()
    return Matrix.from_rows(rows)


def test_gaussian_arithmetic():
    z = GaussianRational(1, 2)
    assert z * z.conjugate() == 5
    assert z * z.inverse() == 1
    assert I * I == -1
    assert (z + 1) - z == 1
    assert GaussianRational(3, 0) == 3
    assert hash(GaussianRational(Fraction(1, 2), 0)) == hash(Fraction(1, 2))


@given(fracs, fracs, fracs, fracs)
def test_gaussian_field_axioms(a, b, c, d):
    x, y = GaussianRational(a, b), GaussianRational(c, d)
    assert x * y == y * x
    assert (x + y).conjugate() == x.conjugate() + y.conjugate()
    if y:
        assert (x / y) * y == x


def test_rank_examples():
    assert int_rank([[1, 2], [2, 4]]) == 1
    assert int_rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert mat_rank(Matrix.from_rows([[1, I], [I, -1]])) == 1
    assert mat_rank(Matrix.from_rows([[Fraction(1, 2), Fraction(1, 3)], [3, 2]])) == 1


def test_kernel_example():
    k = kernel_basis(Matrix.from_rows([[1, 1, -2]]))
    assert k.cols == 2
    assert set(k.columns()) == {(-1, 1, 0), (2, 0, 1)}


@given(int_matrices())
def test_rank_matches_sympy(rows):
    # [DERIVED] sympy is an independent rank oracle
    assert int_rank(rows) == sympy.Matrix(rows).rank()


@given(int_matrices())
def test_rank_plus_nullity(rows):
    m = Matrix.from_rows(rows)
    k = kernel_basis(m)
    assert mat_rank(m) + k.cols == m.cols
    for col in k.columns():
        assert all(x == 0 for x in m.apply(col))
        assert primitive(col) == tuple(col)


@given(int_matrices())
def test_bareiss_pivots_are_independent(rows):
    _, piv = bareiss_echelon(rows)
    sub = [[r[c] for c in piv] for r in rows]
    assert int_rank(sub) == len(piv)


@given(st.lists(fracs, min_size=1, max_size=6))
def test_primitive(vec):
    p = primitive(vec)
    assert all(isinstance(x, int) for x in p)
    if any(vec):
        nz = next(i for i, x in enumerate(vec) if x)
        ratio = Fraction(p[nz]) / vec[nz]
        assert ratio > 0
        assert all(Fraction(a) == ratio * b for a, b in zip(p, vec))


def test_char_poly_examples():
    # det(t - diag(1,2,3)) = t^3 - 6t^2 + 11t - 6
    assert char_poly(Matrix.diag([1, 2, 3])) == [-6, 11, -6, 1]
    # sigma_y: t^2 - 1
    assert char_poly(Matrix.from_rows([[0, -I], [I, 0]])) == [-1, 0, 1]
    with pytest.raises(NotHermitian):
        char_poly(Matrix.from_rows([[0, 1], [0, 0]]))


@settings(max_examples=60)
@given(hermitian())
def test_char_poly_matches_sympy(m):
    t = sympy.Symbol("t")
    sm = sympy.Matrix([[sympy.Rational(x.re.numerator, x.re.denominator)
                        + sympy.I * sympy.Rational(x.im.numerator, x.im.denominator)
                        for x in map(GaussianRational.coerce, m.row(i))] for i in range(m.rows)])
    ref = sympy.Poly(sympy.expand(sm.charpoly(t).as_expr()), t).all_coeffs()[::-1]
    ours = char_poly(m)
    assert [sympy.expand(x) for x in ref] == [sympy.Rational(c.numerator, c.denominator) for c in ours]


@settings(max_examples=60)
@given(hermitian())
def test_cayley_hamilton(m):
    coeffs = char_poly(m)
    acc = Matrix.zeros(m.rows, m.cols)
    power = Matrix.identity(m.rows)
    for c in coeffs:
        acc = acc + power.scale(c)
        power = power @ m
    assert acc.is_zero()


@given(st.lists(fracs, min_size=1, max_size=5))
def test_psd_diagonal(vals):
    assert is_psd(Matrix.diag(vals)) == all(v >= 0 for v in vals)


@given(fracs, fracs, fracs, fracs)
def test_psd_two_by_two(a, d, re, im):
    # [DERIVED] a 2x2 Hermitian matrix is PSD iff a, d >= 0 and det >= 0
    z = GaussianRational(re, im)
    m = Matrix.from_rows([[a, z], [z.conjugate(), d]])
    det = a * d - (re * re + im * im)
    assert is_psd(m) == (a >= 0 and d >= 0 and det >= 0)


@given(hermitian())
def test_gram_is_psd(m):
    assert is_psd(m.dagger() @ m)


def test_text_round_trip():
    assert parse_rat(rat_str(Fraction(-3, 7))) == Fraction(-3, 7)
    assert parse_rat("5") == 5
    z = GaussianRational(Fraction(1, 2), -3)
    assert parse_gauss(gauss_json(z)) == z
    with pytest.raises(ValueError):
        parse_rat("0.5.1")
