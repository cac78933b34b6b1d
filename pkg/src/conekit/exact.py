"""Exact rational linear algebra and truncated power series.

Scalars are ``gmpy2.mpq`` values (exact, always in lowest terms).  Matrices
are small and dense, so they are plain tuples of rows wrapped in
:class:`RatMatrix`.  Power series in the curve parameter ``t`` are stored as
Taylor coefficients ``c_m = f^{(m)}(0) / m!`` in :class:`Jet`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

ZERO = mpq(0)
ONE = mpq(1)


def Q(value) -> mpq:
    """Coerce ``value`` (int, str ``"p/q"``, Fraction, mpq) to an exact rational.

    Floats are rejected: every value entering the exact pipeline must be exact.
    """
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not an exact rational")
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational string")
        num, _, den = text.partition("/")
        if not _is_int_literal(num) or (den and not _is_int_literal(den)):
            raise ValueError(f"malformed rational {value!r}")
        if den and int(den) == 0:
            raise ZeroDivisionError(f"zero denominator in {value!r}")
        return mpq(int(num), int(den) if den else 1)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def _is_int_literal(text: str) -> bool:
    text = text.strip()
    if text[:1] in "+-":
        text = text[1:]
    return text.isdigit()


def format_rational(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class RatMatrix:
    """Dense immutable matrix of exact rationals."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        rows = tuple(tuple(Q(v) for v in row) for row in data)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ValueError("ragged matrix")
        else:
            ncols = cols or 0
        self._data = rows
        self.rows = len(rows)
        self.cols = ncols

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls([[ZERO] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RatMatrix":
        if not columns:
            return cls.zeros(rows or 0, 0)
        return cls(list(zip(*columns)))

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def tolist(self) -> list[list[mpq]]:
        return [list(r) for r in self._data]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix([list(c) for c in zip(*self._data)], cols=self.rows) if self.rows else RatMatrix.zeros(self.cols, 0)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix([[self._data[i][j] for j in cols] for i in rows], cols=len(cols))

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            oc = list(zip(*other._data)) if other.rows else [()] * other.cols
            return RatMatrix(
                [[sum((a * b for a, b in zip(r, c)), ZERO) for c in oc] for r in self._data],
                cols=other.cols,
            )
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [dot(r, vec) for r in self._data]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash(self._data)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self._data for v in r)

    def to_float(self):
        import numpy as np

        return np.array([[float(v) for v in r] for r in self._data], dtype=float).reshape(self.rows, self.cols)

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(v) for v in r) for r in self._data)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"


def dot(a: Sequence, b: Sequence):
    """Inner product that works for any ring scalars (mpq, Poly, float)."""
    total = ZERO
    for x, y in zip(a, b):
        if x != 0 and y != 0:
            total = total + x * y
    return total


def _as_rows(M) -> list[list[mpq]]:
    if isinstance(M, RatMatrix):
        return M.tolist()
    return [[Q(v) for v in r] for r in M]


def rank_and_pivots(M) -> tuple[int, list[int]]:
    """Rank and pivot columns by fraction-free (Bareiss) elimination.

    Rows are first scaled to integers, so the elimination only ever does
    exact integer divisions.  Pivots are the first nonzero entry in column
    order, which makes the pivot list deterministic.
    """
    rows = _as_rows(M)
    if not rows:
        return 0, []
    ncols = len(rows[0])
    A = []
    for r in rows:
        den = mpz(1)
        for v in r:
            den = gmpy2.lcm(den, v.denominator)
        A.append([mpz(v * den) for v in r])
    nrows = len(A)
    prev = mpz(1)
    rank = 0
    pivots = []
    for c in range(ncols):
        p = next((i for i in range(rank, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[rank], A[p] = A[p], A[rank]
        piv = A[rank][c]
        for i in range(rank + 1, nrows):
            a_ic = A[i][c]
            row_i = A[i]
            row_p = A[rank]
            for j in range(c + 1, ncols):
                row_i[j] = (piv * row_i[j] - a_ic * row_p[j]) // prev
            row_i[c] = mpz(0)
        prev = piv
        pivots.append(c)
        rank += 1
        if rank == nrows:
            break
    return rank, pivots


def rref(M) -> tuple[list[list[mpq]], list[int]]:
    """Reduced row echelon form over the rationals, plus pivot columns."""
    A = _as_rows(M)
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(nrows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A, pivots


def nullspace(M) -> list[list[mpq]]:
    """Basis of ``{v : M v = 0}``, one vector per free column."""
    A, pivots = rref(M)
    ncols = len(A[0]) if A else (M.cols if isinstance(M, RatMatrix) else 0)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -A[i][f]
        basis.append(v)
    return basis


def left_nullspace(M) -> list[list[mpq]]:
    """Basis of row vectors ``w`` with ``w M = 0``."""
    if isinstance(M, RatMatrix):
        if M.rows == 0:
            return []
        if M.cols == 0:
            return [[ONE if i == j else ZERO for j in range(M.rows)] for i in range(M.rows)]
        return nullspace(M.T)
    return nullspace(RatMatrix(M).T)


def column_space_basis(vectors: Sequence[Sequence]) -> list[list[mpq]]:
    """Independent subset (first-come) of ``vectors``."""
    vectors = [[Q(v) for v in vec] for vec in vectors]
    if not vectors:
        return []
    _, piv = rank_and_pivots(RatMatrix(vectors).T)
    return [vectors[j] for j in piv]


def span_rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return rank_and_pivots(RatMatrix(vectors))[0]


class ParticularSolver:
    """Linear map ``X`` with ``M X b = b`` for every ``b`` in the column space of ``M``.

    Built once from the RREF of ``[M | I]``; applying it only needs ring
    operations, so right-hand sides may be polynomials.  ``cokernel`` rows
    ``w`` satisfy ``w M = 0``; ``b`` is in the column space iff ``w b = 0``
    for all of them.
    """

    def __init__(self, M: RatMatrix):
        m, n = M.shape
        aug = [list(M.row(i)) + [ONE if i == j else ZERO for j in range(m)] for i in range(m)]
        R, piv = rref(aug)
        self.pivots = [p for p in piv if p < n]
        self.rank = len(self.pivots)
        self.shape = (m, n)
        # rows of the elimination matrix E (E M = RREF)
        E = [row[n:] for row in R]
        self._X = [[ZERO] * m for _ in range(n)]
        for i, p in enumerate(self.pivots):
            self._X[p] = list(E[i])
        self.cokernel = left_nullspace(M)

    def apply(self, b: Sequence):
        return [dot(row, b) for row in self._X]

    def obstruction(self, b: Sequence):
        return [dot(w, b) for w in self.cokernel]


def solve(M: RatMatrix, b: Sequence) -> list[mpq] | None:
    """A particular solution of ``M x = b`` (free variables 0), or ``None``."""
    solver = ParticularSolver(M)
    b = [Q(v) for v in b]
    if any(v != 0 for v in solver.obstruction(b)):
        return None
    return solver.apply(b)


def determinant(M) -> mpq:
    """Exact determinant by Bareiss elimination on integer-scaled rows."""
    rows = _as_rows(M)
    n = len(rows)
    if n == 0:
        return ONE
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of non-square matrix")
    scale = mpq(1)
    A = []
    for r in rows:
        den = mpz(1)
        for v in r:
            den = gmpy2.lcm(den, v.denominator)
        scale /= den
        A.append([mpz(v * den) for v in r])
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if p is None:
                return ZERO
            A[k], A[p] = A[p], A[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (piv * A[i][j] - A[i][k] * A[k][j]) // prev
        prev = piv
    return sign * scale * mpq(A[n - 1][n - 1])


# ---------------------------------------------------------------------------
# truncated power series


def _trunc_mul(a: Sequence, b: Sequence, length: int) -> list:
    out = [ZERO] * length
    for i, x in enumerate(a[:length]):
        if x == 0:
            continue
        for j in range(min(len(b), length - i)):
            y = b[j]
            if y != 0:
                out[i + j] = out[i + j] + x * y
    return out


class Jet:
    """Truncated power series ``c_0 + c_1 t + ... + c_k t^k`` with exact coefficients.

    Binary operations truncate at the smaller of the two orders.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        coeffs = tuple(Q(c) for c in coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        return cls([value] + [ZERO] * order)

    @classmethod
    def variable(cls, order: int) -> "Jet":
        """The series ``t`` itself."""
        return cls([ZERO, ONE] + [ZERO] * (order - 1)) if order >= 1 else cls([ZERO])

    @classmethod
    def from_derivatives(cls, derivs: Sequence) -> "Jet":
        """Build from raw derivatives ``f(0), f'(0), f''(0), ...``."""
        out = []
        fact = mpz(1)
        for m, d in enumerate(derivs):
            if m > 1:
                fact *= m
            out.append(Q(d) / fact)
        return cls(out)

    def derivatives(self) -> list[mpq]:
        """Raw derivatives ``m! c_m``."""
        out = []
        fact = mpz(1)
        for m, c in enumerate(self.coeffs):
            if m > 1:
                fact *= m
            out.append(c * fact)
        return out

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot extend a jet's order")
        return Jet(self.coeffs[: order + 1])

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            s = Q(other)
            return Jet(a * s for a in self.coeffs)
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(_trunc_mul(self.coeffs, other.coeffs, n))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, ``None`` for the zero jet."""
        return next((m for m, c in enumerate(self.coeffs) if c != 0), None)

    def __repr__(self):
        return "Jet(" + ", ".join(format_rational(c) for c in self.coeffs) + ")"


class SeriesMatrix:
    """Matrix of jets sharing one truncation order."""

    __slots__ = ("rows", "cols", "order", "_data")

    def __init__(self, entries: Sequence[Sequence[Jet]]):
        data = tuple(tuple(e for e in r) for r in entries)
        self.rows = len(data)
        self.cols = len(data[0]) if data else 0
        orders = {e.order for r in data for e in r}
        if len(orders) > 1:
            raise ValueError(f"mixed truncation orders {sorted(orders)}")
        self.order = orders.pop() if orders else 0
        self._data = data

    @classmethod
    def from_coefficients(cls, mats: Sequence[RatMatrix]) -> "SeriesMatrix":
        """From the coefficient matrices ``A_0, A_1, ..., A_k``."""
        m, n = mats[0].shape
        return cls([[Jet(A[i, j] for A in mats) for j in range(n)] for i in range(m)])

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def coefficient(self, m: int) -> RatMatrix:
        return RatMatrix([[e.coeffs[m] for e in r] for r in self._data], cols=self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SeriesMatrix":
        return SeriesMatrix([[self._data[i][j] for j in cols] for i in rows])

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        order = min(self.order, other.order)
        zero = Jet.constant(0, order)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    acc = acc + self._data[i][k] * other._data[k][j]
                row.append(acc)
            out.append(row)
        return SeriesMatrix(out)

    def _raw(self) -> list[list[list]]:
        return [[list(e.coeffs) for e in r] for r in self._data]


def _series_inverse(u: Sequence, length: int) -> list:
    """Inverse of a unit series (``u[0] != 0``) to ``length`` coefficients."""
    inv = [ZERO] * length
    inv[0] = 1 / u[0]
    for m in range(1, length):
        acc = ZERO
        for j in range(1, min(m, len(u) - 1) + 1):
            if u[j] != 0 and inv[m - j] != 0:
                acc += u[j] * inv[m - j]
        inv[m] = -acc * inv[0]
    return inv


def _valuation(a: Sequence, prec: int) -> int:
    for m in range(prec):
        if a[m] != 0:
            return m
    return prec


def _eliminate(A: list[list[list]], prec: int, want_det: bool):
    """Gaussian elimination over Q[[t]] / t^prec with minimal-valuation pivoting.

    Choosing the entry of least t-adic valuation in the whole remaining block
    keeps every Schur-complement entry exact modulo ``t^prec``.  Returns the
    pivot valuations (Smith invariants, ``prec`` meaning "zero to precision")
    and, if requested, the determinant series.
    """
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    rows = list(range(nrows))
    cols = list(range(ncols))
    vals = []
    det = [ONE] + [ZERO] * (prec - 1)
    sign = 1
    for step in range(min(nrows, ncols)):
        best = None
        for ii in range(step, nrows):
            r = A[rows[ii]]
            for jj in range(step, ncols):
                v = _valuation(r[cols[jj]], prec)
                if best is None or v < best[0]:
                    best = (v, ii, jj)
                    if v == 0:
                        break
            if best[0] == 0:
                break
        v, ii, jj = best
        if v >= prec:
            vals.extend([prec] * (min(nrows, ncols) - step))
            det = [ZERO] * prec
            break
        if ii != step:
            rows[step], rows[ii] = rows[ii], rows[step]
            sign = -sign
        if jj != step:
            cols[step], cols[jj] = cols[jj], cols[step]
            sign = -sign
        vals.append(v)
        prow = A[rows[step]]
        pivot = prow[cols[step]]
        if want_det:
            det = _trunc_mul(det, pivot, prec)
        unit_inv = _series_inverse(pivot[v:], prec - v)
        for ii in range(step + 1, nrows):
            r = A[rows[ii]]
            a = r[cols[step]]
            if _valuation(a, prec) >= prec:
                continue
            factor = _trunc_mul(a[v:], unit_inv, prec - v)
            for jj in range(step + 1, ncols):
                c = cols[jj]
                b = prow[c]
                if all(x == 0 for x in b):
                    continue
                prod = _trunc_mul(factor, b, prec)
                r[c] = [x - y for x, y in zip(r[c], prod)]
            r[cols[step]] = [ZERO] * prec
    if sign < 0:
        det = [-c for c in det]
    return vals, det


def series_det(M: SeriesMatrix) -> Jet:
    """Determinant of a square series matrix, truncated at its order."""
    if M.rows != M.cols:
        raise ValueError("series_det needs a square matrix")
    if M.rows == 0:
        return Jet.constant(1, M.order)
    _, det = _eliminate(M._raw(), M.order + 1, want_det=True)
    return Jet(det)


def smith_valuations(M: SeriesMatrix) -> list[int]:
    """t-adic Smith invariants of ``M`` over ``Q[[t]]``, capped at ``order + 1``.

    The ideal generated by all ``k``-minors is ``t^(v_1 + ... + v_k)``, so
    these valuations say exactly at which order each minor size stops
    vanishing identically.
    """
    vals, _ = _eliminate(M._raw(), M.order + 1, want_det=False)
    return vals
