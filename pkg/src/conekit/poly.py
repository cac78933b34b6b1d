"""Sparse multivariate polynomials with exact rational coefficients.

Used wherever a jet or a constraint must be carried symbolically in a few
branch parameters.  The class only implements ring operations plus the bits
the cone solver needs (substitution, homogeneous parts, sympy round trip);
factorisation is delegated to sympy.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .exact import Q, ZERO, format_rational

Monomial = tuple


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for mono, c in terms.items():
                if len(mono) != nvars:
                    raise ValueError("monomial length does not match nvars")
                c = Q(c)
                if c != 0:
                    clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, value) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Poly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            mono = [0] * n
            mono[i] = 1
            terms[tuple(mono)] = c
        return cls(n, terms)

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    # -- ring operations ----------------------------------------------------

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable sets")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other):
        if not isinstance(other, Poly):
            if other == 0:
                return self
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, ZERO) + c
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -Q(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            s = Q(other)
            if s == 0:
                return Poly._raw(self.nvars, {})
            return Poly._raw(self.nvars, {m: c * s for m, c in self.terms.items()})
        other = self._lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, ZERO) + c1 * c2
                if v == 0:
                    out.pop(m, None)
                else:
                    out[m] = v
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / Q(other))

    def __pow__(self, k: int):
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == Poly.constant(self.nvars, other).terms

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._raw(self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d})

    def coefficient(self, mono: Monomial):
        return self.terms.get(tuple(mono), ZERO)

    def linear_coefficients(self) -> list:
        """Coefficients of ``t_0 .. t_{n-1}`` (assumes degree <= 1)."""
        out = [ZERO] * self.nvars
        for m, c in self.terms.items():
            if sum(m) == 1:
                out[m.index(1)] = c
        return out

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, ZERO)

    def __call__(self, point: Sequence):
        total = ZERO
        pt = [Q(v) for v in point]
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v = v * x**e
            total += v
        return total

    def substitute_linear(self, images: Sequence["Poly"]) -> "Poly":
        """Replace variable ``i`` by ``images[i]`` (polys over a new variable set)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        nv = images[0].nvars if images else 0
        total = Poly(nv)
        powers: dict = {}
        for m, c in self.terms.items():
            term = Poly.constant(nv, c)
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = images[i] ** e
                    term = term * powers[key]
            total = total + term
        return total

    # -- sympy bridge -------------------------------------------------------

    def to_sympy(self, symbols):
        import sympy

        expr = sympy.Integer(0)
        for m, c in self.terms.items():
            term = sympy.Rational(int(c.numerator), int(c.denominator))
            for s, e in zip(symbols, m):
                if e:
                    term *= s**e
            expr += term
        return expr

    @classmethod
    def from_sympy(cls, expr, symbols) -> "Poly":
        import sympy

        p = sympy.Poly(sympy.expand(expr), *symbols)
        terms = {}
        for mono, c in p.terms():
            c = sympy.Rational(c)
            terms[tuple(int(e) for e in mono)] = mpq(int(c.p), int(c.q))
        return cls(len(symbols), terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"t{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e)
            parts.append(format_rational(c) + ("*" + mono if mono else ""))
        return " + ".join(parts)


def poly_vector(values: Iterable[Poly]) -> list[Poly]:
    return list(values)


def homogeneous_monomials(nvars: int, degree: int) -> list[Monomial]:
    """All exponent tuples of total ``degree``, in a fixed order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in homogeneous_monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out
