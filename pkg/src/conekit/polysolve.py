"""Linear components through the origin of rational polynomial systems.

The solver only ever replaces the system by an equivalent one (over the
reals) or splits it into a union:

* invertible row operations on the coefficient matrix, which can expose
  purely linear equations (restrict to their kernel) or purely homogeneous
  ones;
* factorisation over Q, branching over linear factors;
* semidefinite quadratic forms, whose real zero set is the kernel of the
  Gram matrix.

Whatever resists these moves is returned as an unresolved residue attached
to the subspace it lives on, never dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exact import ONE, ZERO, RatMatrix, nullspace, rank_and_pivots, rref
from .poly import Poly


@dataclass
class Subspace:
    """``t = basis^T u``: ``basis`` lists spanning vectors in the ambient t-space."""

    basis: list
    residuals: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def resolved(self) -> bool:
        return not self.residuals


@dataclass
class PolySolution:
    branches: list
    nvars: int

    @property
    def unresolved(self) -> bool:
        return any(not b.resolved for b in self.branches)


def _images(basis: Sequence[Sequence], nvars: int) -> list[Poly]:
    """Polys expressing each ambient coordinate in the subspace parameters."""
    e = len(basis)
    return [Poly(e, {tuple(1 if k == c else 0 for k in range(e)): basis[c][i] for c in range(e)}) for i in range(nvars)]


def _restrict(basis: list, linear_rows: list) -> list:
    """Sub-basis of ``span(basis)`` on which the linear forms (in u) vanish."""
    e = len(basis)
    if e == 0:
        return []
    ker = nullspace(RatMatrix(linear_rows, cols=e))
    return [[sum((k[c] * basis[c][i] for c in range(e)), ZERO) for i in range(len(basis[0]))] for k in ker]


def _monomial_matrix(polys: list[Poly], key):
    monos = sorted({m for p in polys for m in p.terms}, key=key)
    rows = [[p.coefficient(mo) for mo in monos] for p in polys]
    return monos, rows


def _rows_to_polys(rows, monos, nvars) -> list[Poly]:
    out = []
    for r in rows:
        p = Poly(nvars, {mo: c for mo, c in zip(monos, r) if c != 0})
        if not p.is_zero():
            out.append(p)
    return out


def _reduce(polys: list[Poly], nvars: int, nonlinear_first: bool) -> list[Poly]:
    """Equivalent system in reduced row echelon form over its monomials."""
    if not polys:
        return []
    if nonlinear_first:
        key = lambda mo: (-sum(mo), tuple(-x for x in mo))
    else:
        key = lambda mo: (sum(mo), tuple(-x for x in mo))
    monos, rows = _monomial_matrix(polys, key)
    R, _ = rref(rows)
    return _rows_to_polys(R, monos, nvars)


def _gram(p: Poly):
    """Symmetric Gram matrix of a homogeneous quadratic form."""
    n = p.nvars
    G = [[ZERO] * n for _ in range(n)]
    for mo, c in p.terms.items():
        idx = [i for i, e in enumerate(mo) for _ in range(e)]
        i, j = idx
        if i == j:
            G[i][i] += c
        else:
            G[i][j] += c / 2
            G[j][i] += c / 2
    return G


def semidefinite_kernel(p: Poly):
    """Kernel basis of the Gram matrix if ``p`` is a semidefinite quadratic form, else None.

    Uses exact symmetric elimination (LDL^T with zero-pivot checks).
    """
    if p.is_zero() or p.degree() != 2 or any(sum(m) != 2 for m in p.terms):
        return None
    G = _gram(p)
    n = len(G)
    A = [row[:] for row in G]
    signs = set()
    for k in range(n):
        d = A[k][k]
        if d == 0:
            if any(A[k][j] != 0 for j in range(k + 1, n)):
                return None
            continue
        signs.add(d > 0)
        for i in range(k + 1, n):
            f = A[i][k] / d
            if f != 0:
                for j in range(k, n):
                    A[i][j] -= f * A[k][j]
    if len(signs) > 1:
        return None
    return nullspace(RatMatrix(G))


def factor_poly(p: Poly):
    """``[(factor, multiplicity), ...]`` over Q, constants dropped."""
    import sympy

    syms = sympy.symbols(f"u0:{p.nvars}") if p.nvars else ()
    _, facs = sympy.factor_list(p.to_sympy(syms), *syms)
    out = []
    for f, mult in facs:
        fp = Poly.from_sympy(f, syms)
        if fp.degree() > 0:
            out.append((fp, int(mult)))
    return out


def _is_linear_form(p: Poly) -> bool:
    return p.degree() == 1 and p.constant_term() == 0


class _Solver:
    """Depth-first splitting; each step returns an equivalent system or a union."""

    def __init__(self, nvars: int, max_branches: int = 256):
        self.nvars = nvars
        self.max_branches = max_branches

    def step(self, polys, basis):
        e = len(basis)
        if e == 0:
            if any(p.constant_term() != 0 for p in polys):
                return None
            return "done", Subspace(basis)
        imgs = _images(basis, self.nvars)
        sub = [q for q in (p.substitute_linear(imgs) for p in polys) if not q.is_zero()]
        if not sub:
            return "done", Subspace(basis)
        if any(p.degree() == 0 for p in sub):
            return None  # inconsistent: no component through the origin
        # purely linear consequences
        reduced = _reduce(sub, e, nonlinear_first=True)
        if any(p.degree() == 0 for p in reduced):
            return None
        lin = [p for p in reduced if _is_linear_form(p)]
        if lin:
            rows = [p.linear_coefficients() for p in lin]
            return "split", [(polys, _restrict(basis, rows))]
        system = _reduce(sub, e, nonlinear_first=False)
        homog = [p for p in system if len({sum(m) for m in p.terms}) == 1]
        homog.sort(key=lambda p: (p.degree(), len(p.terms)))
        for p in homog:
            ker = semidefinite_kernel(p)
            if ker is not None:
                return "split", [(polys, _compose(basis, ker))]
        for p in homog:
            facs = factor_poly(p)
            linear = [f for f, _ in facs if _is_linear_form(f)]
            rest = [f for f, _ in facs if not _is_linear_form(f)]
            if not linear:
                continue
            branches = [(polys, _restrict(basis, [f.linear_coefficients()])) for f in linear]
            for f in rest:
                ker = semidefinite_kernel(f)
                if ker is not None:
                    branches.append((polys, _compose(basis, ker)))
                else:
                    # the nonlinear factor's zero set stays unresolved on this subspace
                    others = [q for q in system if q is not p]
                    branches.append(("unresolved", basis, [f] + others))
            return "split", branches
        return "done", Subspace(basis, system)


def _compose(basis, ker):
    e = len(basis)
    return [[sum((k[c] * basis[c][i] for c in range(e)), ZERO) for i in range(len(basis[0]))] for k in ker]


def solve_poly_cone(polys: Sequence[Poly], nvars: int, basis: list | None = None) -> PolySolution:
    """Maximal linear subspaces (through 0) of the real zero set of ``polys``.

    Polynomials need not be homogeneous; the zero set itself need not be a
    cone, only the subspaces returned are.

    ``basis`` restricts the search to a subspace of the ambient space
    (defaults to the whole space).  Branches carrying residuals are
    unresolved: the zero set inside them is not a union of subspaces the
    strategy could identify.
    """
    if basis is None:
        basis = [[ONE if i == j else ZERO for i in range(nvars)] for j in range(nvars)]
    solver = _Solver(nvars)
    # a subspace through 0 lies in {p = 0} iff it lies in every {p_d = 0}
    split = []
    for p in polys:
        if p.is_zero():
            continue
        degrees = sorted({sum(mo) for mo in p.terms})
        split.extend(p.homogeneous_part(d) for d in degrees)
    polys = split
    stack = [(list(polys), basis)]
    out = []
    while stack:
        item = stack.pop()
        if len(item) == 3:
            _, b, residue = item
            out.append(Subspace(b, residue))
            continue
        ps, b = item
        if len(out) + len(stack) >= solver.max_branches:
            out.append(Subspace(b, list(ps)))
            continue
        res = solver.step(ps, b)
        if res is None:
            continue
        kind, payload = res
        if kind == "done":
            out.append(payload)
        else:
            stack.extend(payload)
    branches = _verify_and_prune(list(polys), out, nvars)
    return PolySolution(branches, nvars)


def _vanishes_on(polys, basis, nvars) -> bool:
    if not basis:
        return all(p.constant_term() == 0 for p in polys)
    imgs = _images(basis, nvars)
    return all(p.substitute_linear(imgs).is_zero() for p in polys)


def _contains(big: list, small: list) -> bool:
    if not small:
        return True
    if not big:
        return False
    r_big = rank_and_pivots(RatMatrix(big))[0]
    return rank_and_pivots(RatMatrix(big + small))[0] == r_big


def _verify_and_prune(polys, branches, nvars):
    resolved = []
    unresolved = []
    for b in branches:
        if b.resolved:
            if not _vanishes_on(polys, b.basis, nvars):
                raise AssertionError("solver produced a subspace that does not solve the system")
            resolved.append(b)
        else:
            unresolved.append(b)
    resolved.sort(key=lambda b: -b.dim)
    kept: list[Subspace] = []
    for b in resolved:
        if any(_contains(k.basis, b.basis) for k in kept):
            continue
        kept.append(b)
    kept_unres = []
    for b in unresolved:
        if any(_contains(k.basis, b.basis) for k in kept):
            continue
        kept_unres.append(b)
    return kept + kept_unres
