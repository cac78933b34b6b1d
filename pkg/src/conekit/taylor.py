"""Taylor approximations V^k of the configuration space at q0.

``f_l(q0 + x) = I + T_1(x) + T_2(x) + ...`` where ``T_k`` is homogeneous of
degree k (``T_k = d^k f / k!``).  V^k collects the x with
``T_1(x) + ... + T_k(x) = 0`` for every loop; only its linear components
through the origin are solved for.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import jets
from .cones import ConeResult, compare_spans, first_order_cone
from .exact import ZERO
from .model import LinkageModel
from .poly import Poly
from .polysolve import Subspace, solve_poly_cone


def _straight_line(nvars: int, columns: list | None, n: int):
    """Taylor data of ``q(t) = x t`` with x = basis @ u (or free)."""
    if columns is None:
        return [[Poly.var(n, i) for i in range(n)]]
    d = len(columns)
    return [[Poly(d, {tuple(1 if k == c else 0 for k in range(d)): columns[c][i] for c in range(d)}) for i in range(n)]]


def differentials(m: LinkageModel, l: int, k: int, basis: list | None = None) -> list:
    """Homogeneous terms ``T_1 .. T_k`` of ``f_l(q0 + x)`` as 4x4 polynomial matrices.

    With ``basis`` the variables are coordinates on ``span(basis)``.
    """
    if k < 1:
        raise ValueError("order must be at least 1")
    if not 0 <= l < m.gamma:
        raise IndexError(f"loop index {l} out of range")
    taylor = _straight_line(m.n, basis, m.n)
    f = jets.loop_product_series(m, l, taylor, k + 1)
    nv = m.n if basis is None else len(basis)
    return [[[_poly(v, nv) for v in row] for row in f[d]] for d in range(1, k + 1)]


def _poly(v, nv):
    return v if isinstance(v, Poly) else Poly.constant(nv, v)


@dataclass
class TaylorSystem:
    order: int
    equations: list  # per loop, the 12 entries of the top 3x4 block of T_1 + ... + T_k
    branches: list  # Subspace objects in R^n
    nvars: int

    @property
    def unresolved(self) -> bool:
        return any(not b.resolved for b in self.branches)

    def dims(self) -> list[int]:
        return [b.dim for b in self.branches]


def vk_solve(m: LinkageModel, k: int) -> TaylorSystem:
    """Linear components through the origin of V^k.

    The degree-1 equations are solved first (they cut V^k down to ker J);
    the remaining terms are computed on that subspace.
    """
    if k < 1:
        raise ValueError("order must be at least 1")
    first = first_order_cone(m)
    basis = first.basis
    d = len(basis)
    equations = []
    polys = []
    for l in range(m.gamma):
        terms = differentials(m, l, k, basis)
        total = [[sum((terms[j][r][c] for j in range(k)), Poly(d)) for c in range(4)] for r in range(3)]
        eqs = [p for row in total for p in row]
        equations.append(eqs)
        polys.extend(p for p in eqs if not p.is_zero())
    if d == 0:
        return TaylorSystem(k, equations, [Subspace([])], m.n)
    sol = solve_poly_cone(polys, d)
    branches = []
    for sub in sol.branches:
        ambient = [[sum((v[c] * basis[c][i] for c in range(d)), ZERO) for i in range(m.n)] for v in sub.basis]
        branches.append(Subspace(ambient, list(sub.residuals)))
    return TaylorSystem(k, equations, branches, m.n)


def compare_with_cone(system: TaylorSystem, cone_branches: list) -> str:
    """``equal`` / ``different`` / ``inconclusive`` (residue on either side)."""
    if system.unresolved or any(not b.resolved for b in cone_branches):
        return "inconclusive"
    if len(system.branches) != len(cone_branches):
        return "different"
    used = set()
    for s in system.branches:
        hit = next(
            (i for i, b in enumerate(cone_branches) if i not in used and compare_spans(s.basis, b.basis) == "equal"),
            None,
        )
        if hit is None:
            return "different"
        used.add(hit)
    return "equal"


def compare_chain(m: LinkageModel, cone: ConeResult, orders) -> dict:
    """V^k vs K^k verdict for each requested order."""
    out = {}
    for k in orders:
        if k > len(cone.orders):
            continue
        out[k] = compare_with_cone(vk_solve(m, k), cone.cone(k))
    return out
