"""Exact scalars and dense linear algebra.

Rationals are :class:`fractions.Fraction` (always canonical: positive
denominator, reduced).  :class:`GaussianRational` adds an imaginary part.
:class:`Matrix` is an immutable row-major matrix whose entries may be ints,
Fractions or GaussianRationals; all operations return new matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational as _RationalABC

from .errors import NotHermitian

Rational = Fraction

__all__ = [
    "Rational",
    "GaussianRational",
    "Matrix",
    "mat_rank",
    "kernel_basis",
    "char_poly",
    "is_psd",
    "bareiss_echelon",
    "int_rank",
    "primitive",
    "rat_str",
    "parse_rat",
    "gauss_json",
    "parse_gauss",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(x, 0)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({rat_str(self.re)!s}, {rat_str(self.im)!s})"

    def __str__(self):
        if self.im == 0:
            return rat_str(self.re)
        if self.re == 0:
            return f"{rat_str(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{rat_str(self.re)}{sign}{rat_str(abs(self.im))}i"


I = GaussianRational(0, 1)


def conj(x):
    return x.conjugate() if isinstance(x, GaussianRational) else x


def real_part(x) -> Fraction:
    if isinstance(x, GaussianRational):
        return x.re
    return _frac(x)


def imag_part(x) -> Fraction:
    if isinstance(x, GaussianRational):
        return x.im
    return Fraction(0)


def _simplify(x):
    # Keep real-valued entries as plain ints/Fractions so that equality and
    # serialization do not depend on how a value was produced.
    if isinstance(x, GaussianRational) and x.im == 0:
        x = x.re
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entries length {len(self.entries)} != {self.rows}x{self.cols}"
            )

    # ---- construction ----
    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if n else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(n, m, tuple(_simplify(x) for r in rows for x in r))

    @classmethod
    def from_cols(cls, cols) -> "Matrix":
        cols = [list(c) for c in cols]
        if not cols:
            raise ValueError("from_cols needs at least one column; use Matrix.zeros")
        return cls.from_rows(zip(*cols))

    @classmethod
    def zeros(cls, rows, cols) -> "Matrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n) -> "Matrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, values) -> "Matrix":
        values = list(values)
        n = len(values)
        return cls.from_rows(
            [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        )

    # ---- access ----
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j) -> tuple:
        return self.entries[j::self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    # ---- arithmetic ----
    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols,
                      tuple(_simplify(a + b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols,
                      tuple(_simplify(a - b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(_simplify(-a) for a in self.entries))

    def scale(self, c) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(_simplify(c * a) for a in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                s = 0
                for a, b in zip(r, c):
                    if a and b:
                        s = s + a * b
                out.append(_simplify(s))
        return Matrix(self.rows, other.cols, tuple(out))

    def apply(self, vec) -> tuple:
        """Matrix-vector product with a plain sequence."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for i in range(self.rows):
            s = 0
            for a, b in zip(self.row(i), vec):
                if a and b:
                    s = s + a * b
            out.append(_simplify(s))
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(self.entries[i * self.cols + j]
                            for j in range(self.cols) for i in range(self.rows)))

    def dagger(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(_simplify(conj(self.entries[i * self.cols + j]))
                            for j in range(self.cols) for i in range(self.rows)))

    def trace(self):
        if not self.is_square:
            raise ValueError("trace of non-square matrix")
        s = 0
        for i in range(self.rows):
            s = s + self[i, i]
        return _simplify(s)

    def kron(self, other: "Matrix") -> "Matrix":
        rows = []
        for i in range(self.rows):
            for k in range(other.rows):
                rows.append([self[i, j] * other[k, l]
                             for j in range(self.cols) for l in range(other.cols)])
        return Matrix.from_rows(rows)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_hermitian(self) -> bool:
        return self.is_square and self == self.dagger()

    def commutes_with(self, other: "Matrix") -> bool:
        return (self @ other) == (other @ self)

    def vec(self) -> tuple:
        return self.entries

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in self.row(i)) + "]"
                         for i in range(self.rows))


# ---------------------------------------------------------------------------
# integer elimination
# ---------------------------------------------------------------------------

def primitive(vec) -> tuple:
    """Scale a rational vector to the unique coprime integer vector on the
    same ray (positive multiple).  The zero vector is returned unchanged."""
    vec = [_frac(x) for x in vec]
    den = reduce(lcm, (x.denominator for x in vec), 1)
    ints = [int(x * den) for x in vec]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _integer_rows(rows) -> list:
    out = []
    for r in rows:
        r = [_frac(x) for x in r]
        den = reduce(lcm, (x.denominator for x in r), 1)
        out.append([int(x * den) for x in r])
    return out


def bareiss_echelon(rows) -> tuple:
    """Fraction-free (Bareiss) row echelon form of an integer matrix.

    ``rows`` is consumed as a list of integer lists.  Pivots are chosen as the
    first nonzero entry in column order, scanning rows top-down.  Returns
    ``(echelon_rows, pivot_cols)`` where only the first ``len(pivot_cols)``
    rows are meaningful.
    """
    a = [list(r) for r in rows]
    n = len(a)
    m = len(a[0]) if n else 0
    pivots = []
    prev = 1
    r = 0
    for c in range(m):
        if r == n:
            break
        p = next((i for i in range(r, n) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        prow = a[r]
        for i in range(r + 1, n):
            row = a[i]
            f = row[c]
            if f == 0:
                if piv != prev:
                    for j in range(c + 1, m):
                        if row[j]:
                            row[j] = (piv * row[j]) // prev
                continue
            for j in range(c + 1, m):
                row[j] = (piv * row[j] - f * prow[j]) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots


def int_rank(rows) -> int:
    rows = list(rows)
    if not rows or not rows[0]:
        return 0
    return len(bareiss_echelon(rows)[1])


def _field_echelon(rows):
    a = [list(r) for r in rows]
    n = len(a)
    m = len(a[0]) if n else 0
    pivots = []
    r = 0
    for c in range(m):
        if r == n:
            break
        p = next((i for i in range(r, n) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / GaussianRational.coerce(a[r][c])
        a[r] = [_simplify(x * inv) for x in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [_simplify(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def _is_real(m: Matrix) -> bool:
    return all(not isinstance(x, GaussianRational) or x.im == 0 for x in m.entries)


def mat_rank(m: Matrix) -> int:
    """Exact rank.  Real matrices go through Bareiss elimination on integers
    (rows scaled by their common denominators), complex ones through plain
    Gauss-Jordan over the Gaussian rationals."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if _is_real(m):
        return int_rank(_integer_rows(m.to_rows()))
    return len(_field_echelon(m.to_rows())[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Integer basis of the right kernel of a rational matrix.

    Columns are primitive integer vectors; the coefficient of each free
    variable is positive.  Returns an ``m.cols x 0`` matrix when the kernel is
    trivial.
    """
    if not _is_real(m):
        raise TypeError("kernel_basis expects a rational matrix")
    n = m.cols
    if m.rows == 0:
        return Matrix.identity(n)
    ech, pivots = bareiss_echelon(_integer_rows(m.to_rows()))
    rank = len(pivots)
    free = [c for c in range(n) if c not in set(pivots)]
    if not free:
        return Matrix(n, 0, ())
    # Reduce the echelon rows to RREF over Fractions for back substitution.
    rref = [[Fraction(x) for x in ech[i]] for i in range(rank)]
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        piv = rref[i][c]
        rref[i] = [x / piv for x in rref[i]]
        for k in range(i):
            f = rref[k][c]
            if f:
                rref[k] = [x - f * y for x, y in zip(rref[k], rref[i])]
    cols = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rref[i][f]
        cols.append(primitive(v))
    return Matrix.from_cols(cols)


# ---------------------------------------------------------------------------
# characteristic polynomial / PSD
# ---------------------------------------------------------------------------

def char_poly(m: Matrix) -> list:
    """Coefficients of det(t*I - m), ascending powers, for Hermitian ``m``.

    Faddeev-LeVerrier; every trace is checked to be real.
    """
    if not m.is_square:
        raise NotHermitian("matrix is not square")
    if not m.is_hermitian():
        raise NotHermitian("matrix differs from its conjugate transpose")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    eye = Matrix.identity(n)
    mk = Matrix.zeros(n, n)
    for k in range(1, n + 1):
        mk = m @ mk + eye.scale(coeffs[n - k + 1])
        tr = (m @ mk).trace()
        if imag_part(tr) != 0:
            raise AssertionError(f"non-real trace {tr} in Faddeev-LeVerrier")
        coeffs[n - k] = -real_part(tr) / k
    return coeffs


def is_psd(m: Matrix) -> bool:
    """Exact semidefiniteness test from the sign pattern of the
    characteristic polynomial: all roots are >= 0 iff the coefficients
    alternate in sign (zeros allowed)."""
    coeffs = char_poly(m)
    n = len(coeffs) - 1
    return all((-1) ** (n - k) * a >= 0 for k, a in enumerate(coeffs))


# ---------------------------------------------------------------------------
# text encodings
# ---------------------------------------------------------------------------

def rat_str(x) -> str:
    x = _frac(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"rational must be a string 'p/q', got {s!r}")
    s = s.strip()
    num, slash, den = s.partition("/")
    try:
        if slash:
            q = int(den)
            if q == 0:
                raise ValueError("zero denominator")
            return Fraction(int(num), q)
        return Fraction(int(num))
    except ValueError as exc:
        raise ValueError(f"malformed rational {s!r}") from exc


def gauss_json(x) -> list:
    return [rat_str(real_part(x)), rat_str(imag_part(x))]


def parse_gauss(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return _simplify(GaussianRational(parse_rat(v[0]), parse_rat(v[1])))
    if isinstance(v, (str, int)):
        return _simplify(parse_rat(v))
    raise ValueError(f"Gaussian rational must be [re, im], got {v!r}")
