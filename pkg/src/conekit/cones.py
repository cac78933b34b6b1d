"""Kinematic tangent cones K^1 ⊇ K^2 ⊇ ... and the rank-stratified cones of L_k.

A cone is kept as a union of linear branches.  Each branch stores a basis of
first-order directions ``x = B t`` together with witness Taylor vectors
``a_2(t), a_3(t), ...`` (polynomials in the branch parameters ``t``) that
solve the constraint hierarchy identically in ``t`` through the branch's
certified order.  This makes the "exists y, z, ..." part of the cone
definition constructive and checkable.

Refinement from order K to K+1 (``c`` = order-K coefficient of the loop
twist, ``W`` = cokernel of J(q0)):

1. ``W c == 0``: the next Taylor vector is a particular solution of
   ``(K+1) J a_{K+1} = -c``.
2. otherwise, for K >= 2, ``a_K`` may still be shifted by any kernel vector
   ``s(t)`` (it only entered lower orders through ``J a_K``).  ``c`` is
   affine in that shift, so a homogeneous polynomial ``s(t)`` is sought by
   exact linear algebra.
3. if no shift exists the branch parameters are restricted: for K = 1 to
   the zero set of ``W c``; for K >= 2 to where ``W c`` lies in the span of
   the shift directions (rank conditions on ``[A(t) | W c]``).
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from . import jets
from .exact import ZERO, ParticularSolver, Q, RatMatrix, nullspace, rank_and_pivots, solve
from .model import LinkageModel, jacobian
from .poly import Poly, homogeneous_monomials
from .polysolve import solve_poly_cone

log = logging.getLogger(__name__)

DEFAULT_ORDER_CAP = 6


class ConeError(ValueError):
    pass


@dataclass
class ConeBranch:
    """Linear branch of first-order directions with witness jets."""

    basis: list  # d vectors in R^n
    witness: list  # Taylor vectors a_1..a_K, each a list of n Polys in d variables
    kernel: list  # basis of ker J(q0), used to randomise the top witness vector
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def certified(self) -> int:
        return len(self.witness)

    @property
    def resolved(self) -> bool:
        return not self.residuals and not self.notes

    def taylor_at(self, point: Sequence) -> list[list[mpq]]:
        point = [Q(v) for v in point]
        return [[p(point) for p in vec] for vec in self.witness]

    def jet_at(self, point: Sequence) -> jets.MotionJet:
        return jets.MotionJet.from_taylor(self.taylor_at(point))

    def sample_taylor(self, rng: random.Random, order: int | None = None) -> list[list[mpq]]:
        """Witness jet at a random parameter point.

        With ``order`` below the certified order the jet is truncated, so
        every vector kept is constrained by the next order.  Otherwise the
        top vector is shifted by a random kernel element (still a solution).
        """
        point = [jets.random_rational(rng) for _ in range(self.dim)]
        taylor = self.taylor_at(point)
        if order is not None and order < len(taylor):
            return taylor[:order]
        if len(taylor) >= 2 and self.kernel:
            shift = [ZERO] * len(taylor[-1])
            for v in self.kernel:
                c = jets.random_rational(rng)
                shift = [a + c * b for a, b in zip(shift, v)]
            taylor[-1] = [a + b for a, b in zip(taylor[-1], shift)]
        return taylor

    def restrict(self, sub: Sequence[Sequence]) -> "ConeBranch":
        """Branch on ``t = sub^T u`` (``sub`` lists vectors in parameter space)."""
        e = len(sub)
        n = len(self.basis[0]) if self.basis else 0
        basis = [[sum((v[c] * self.basis[c][i] for c in range(self.dim)), ZERO) for i in range(n)] for v in sub]
        images = [Poly(e, {tuple(1 if k == c else 0 for k in range(e)): sub[c][i] for c in range(e)}) for i in range(self.dim)]
        witness = [[p.substitute_linear(images) for p in vec] for vec in self.witness]
        return ConeBranch(basis, witness, self.kernel, list(self.residuals), list(self.notes))


@dataclass
class ConeResult:
    """Branch sets per order (index 0 is K^1) and the termination status."""

    orders: list
    kappa: int | None
    status: str  # "stabilized" | "order-cap" | "unresolved"

    def cone(self, i: int) -> list[ConeBranch]:
        return self.orders[i - 1]

    def dims(self) -> list[list[int]]:
        return [[b.dim for b in br] for br in self.orders]

    @property
    def terminal(self) -> list[ConeBranch]:
        return self.orders[(self.kappa or len(self.orders)) - 1]


class _Context:
    """Per-model exact data shared by all refinements."""

    def __init__(self, m: LinkageModel):
        self.model = m
        self.J = jacobian(m)
        self.solver = ParticularSolver(self.J)
        self.cokernel = self.solver.cokernel
        self.kernel = nullspace(self.J)
        self.rank = self.solver.rank


_CONTEXTS: dict = {}


def _context(m: LinkageModel) -> _Context:
    key = id(m)
    ctx = _CONTEXTS.get(key)
    if ctx is None or ctx.model is not m:
        ctx = _Context(m)
        _CONTEXTS[key] = ctx
    return ctx


def first_order_cone(m: LinkageModel) -> ConeBranch:
    """K^1 = ker J(q0) as a single branch."""
    ctx = _context(m)
    basis = [list(v) for v in ctx.kernel]
    d = len(basis)
    a1 = [Poly(d, {tuple(1 if k == c else 0 for k in range(d)): basis[c][i] for c in range(d)}) for i in range(m.n)]
    return ConeBranch(basis, [a1], ctx.kernel)


def _obstruction(ctx: _Context, c: Sequence) -> list:
    return [sum((w[i] * c[i] for i in range(len(c)) if w[i] != 0), ZERO) for w in ctx.cokernel]


def _top_coefficient(ctx: _Context, witness: list) -> list:
    K = len(witness)
    coeffs = jets.constraint_coefficients(ctx.model, witness, K + 1)
    return coeffs[K]


def _as_poly(v, d: int) -> Poly:
    return v if isinstance(v, Poly) else Poly.constant(d, v)


def _shift_system(ctx: _Context, branch: ConeBranch, c: list, r: list):
    """Columns ``A_j(t) = W (c(a_K + n_j) - c(a_K))`` of the obstruction's shift response."""
    d = branch.dim
    K = branch.certified
    cols = []
    for nvec in ctx.kernel:
        shifted = [list(v) for v in branch.witness]
        shifted[K - 1] = [p + x for p, x in zip(shifted[K - 1], nvec)]
        c2 = _top_coefficient(ctx, shifted)
        diff = [a - b for a, b in zip(c2, c)]
        cols.append([_as_poly(v, d) for v in _obstruction(ctx, diff)])
    return cols


def _polynomial_shift(ctx: _Context, branch: ConeBranch, cols: list, r: list):
    """Homogeneous degree-K coefficients ``s_j(t)`` with ``sum_j A_j s_j = -r``, or None."""
    d = branch.dim
    K = branch.certified
    monos = homogeneous_monomials(d, K)
    out_monos = homogeneous_monomials(d, K + 1)
    out_index = {mo: i for i, mo in enumerate(out_monos)}
    nobs = len(ctx.cokernel)
    nunk = len(cols) * len(monos)
    rows = [[ZERO] * nunk for _ in range(nobs * len(out_monos))]
    rhs = [ZERO] * (nobs * len(out_monos))
    for j, col in enumerate(cols):
        for w in range(nobs):
            a = col[w]
            for am, ac in a.terms.items():
                for k, mo in enumerate(monos):
                    prod = tuple(x + y for x, y in zip(am, mo))
                    rows[w * len(out_monos) + out_index[prod]][j * len(monos) + k] += ac
    for w in range(nobs):
        for mo, cval in _as_poly(r[w], d).terms.items():
            rhs[w * len(out_monos) + out_index[mo]] -= cval
    sol = solve(RatMatrix(rows, cols=nunk), rhs)
    if sol is None:
        return None
    shifts = []
    for j in range(len(cols)):
        shifts.append(Poly(d, {mo: sol[j * len(monos) + k] for k, mo in enumerate(monos)}))
    return shifts


def _poly_det(M: list[list[Poly]], d: int) -> Poly:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = Poly(d)
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _poly_det(minor, d)
        total = total + (term if j % 2 == 0 else -term)
    return total


def _solvability_conditions(cols: list, r: list, d: int, rng: random.Random) -> tuple[list[Poly], int]:
    """Minors of ``[A | r]`` one size above the generic rank of ``A``."""
    import itertools

    nobs = len(r)
    A = [[cols[j][w] for j in range(len(cols))] for w in range(nobs)]
    point = [jets.random_rational(rng) for _ in range(d)]
    Anum = [[p(point) for p in row] for row in A]
    rho = rank_and_pivots(RatMatrix(Anum, cols=len(cols)))[0] if cols else 0
    aug = [row + [_as_poly(r[w], d)] for w, row in enumerate(A)]
    size = rho + 1
    if size > nobs:
        return [], rho
    polys = []
    ncol = len(cols) + 1
    for rows in itertools.combinations(range(nobs), size):
        for cs in itertools.combinations(range(ncol), size):
            if ncol - 1 not in cs:
                continue
            p = _poly_det([[aug[i][j] for j in cs] for i in rows], d)
            if not p.is_zero():
                polys.append(p)
    return polys, rho


def _advance(ctx: _Context, branch: ConeBranch, c: list) -> ConeBranch:
    K = branch.certified
    d = branch.dim
    nxt = [_as_poly(v, d) * mpq(-1, K + 1) for v in ctx.solver.apply(c)]
    return ConeBranch(branch.basis, branch.witness + [nxt], branch.kernel, list(branch.residuals), list(branch.notes))


def extend(m: LinkageModel, branch: ConeBranch, rng: random.Random | None = None, depth: int = 0) -> list[ConeBranch]:
    """Certify ``branch`` one order higher, splitting or restricting it if needed."""
    ctx = _context(m)
    rng = rng or random.Random(0)
    d = branch.dim
    K = branch.certified
    if d == 0:
        zero = [Poly(0)] * m.n
        return [ConeBranch(branch.basis, branch.witness + [zero], branch.kernel, list(branch.residuals), list(branch.notes))]
    c = [_as_poly(v, d) for v in _top_coefficient(ctx, branch.witness)]
    r = [_as_poly(v, d) for v in _obstruction(ctx, c)]
    if all(p.is_zero() for p in r):
        return [_advance(ctx, branch, c)]
    if K >= 2:
        cols = _shift_system(ctx, branch, c, r)
        shifts = _polynomial_shift(ctx, branch, cols, r)
        if shifts is not None:
            witness = [list(v) for v in branch.witness]
            top = witness[K - 1]
            for s, nvec in zip(shifts, ctx.kernel):
                if s.is_zero():
                    continue
                top = [p + s * x if x != 0 else p for p, x in zip(top, nvec)]
            witness[K - 1] = top
            fixed = ConeBranch(branch.basis, witness, branch.kernel, list(branch.residuals), list(branch.notes))
            c2 = [_as_poly(v, d) for v in _top_coefficient(ctx, witness)]
            if not all(_as_poly(p, d).is_zero() for p in _obstruction(ctx, c2)):
                raise AssertionError("polynomial shift failed to remove the obstruction")
            return [_advance(ctx, fixed, c2)]
        conditions, rho = _solvability_conditions(cols, r, d, rng)
        if not conditions:
            note = f"order {K + 1}: a witness exists only as a rational (non-polynomial) function of the branch parameters"
            return [_advance_uncertified(ctx, branch, c, note, r)]
    else:
        conditions = r
    sol = solve_poly_cone(conditions, d)
    out = []
    for sub in sol.branches:
        if sub.dim == d and sub.resolved:
            # nothing restricted but still obstructed: cannot make progress
            out.append(_advance_uncertified(ctx, branch, c, f"order {K + 1}: obstruction not removable", r))
            continue
        child = branch.restrict(sub.basis)
        if not sub.resolved:
            child.residuals.extend(sub.residuals)
            child.notes.append(f"order {K + 1}: unresolved nonlinear conditions")
            child.witness.append([Poly(child.dim)] * m.n)
            out.append(child)
            continue
        if depth > 8:
            raise ConeError("refinement did not settle")
        out.extend(extend(m, child, rng, depth + 1))
    return out


def _advance_uncertified(ctx, branch, c, note, r):
    b = _advance(ctx, branch, c)
    b.notes.append(note)
    b.residuals.extend(p for p in r if not p.is_zero())
    return b


def refine(m: LinkageModel, branches: Sequence[ConeBranch], order: int, seed: int = 0) -> list[ConeBranch]:
    """Branch set of K^order from branches certified through ``order - 1``."""
    rng = random.Random(seed)
    out = []
    for b in branches:
        if b.certified >= order:
            out.append(b)
            continue
        if b.certified != order - 1:
            raise ConeError(f"branch certified through {b.certified}, cannot jump to {order}")
        out.extend(extend(m, b, rng))
    return prune(out)


def prune(branches: list[ConeBranch]) -> list[ConeBranch]:
    """Drop resolved branches whose span lies inside another resolved branch."""
    keep: list[ConeBranch] = []
    for b in sorted(branches, key=lambda b: -b.dim):
        if b.resolved and any(k.resolved and compare_spans(k.basis, b.basis) in ("equal", "superset") for k in keep):
            continue
        keep.append(b)
    return keep


def tangent_cone(m: LinkageModel, max_order: int = DEFAULT_ORDER_CAP, seed: int = 0) -> ConeResult:
    """Cone chain K^1 ⊇ ... ⊇ K^max_order and the stabilization order kappa.

    ``kappa`` is the first order from which every later computed cone has
    the same branch spans; ``None`` if the last two orders still differ.
    """
    if max_order < 1:
        raise ConeError("order must be at least 1")
    orders = [[first_order_cone(m)]]
    for i in range(2, max_order + 1):
        orders.append(refine(m, orders[-1], i, seed=seed))
    kappa = None
    for i in range(len(orders) - 1, 0, -1):
        if not _same_branches(orders[i - 1], orders[i]):
            break
        kappa = i
    unresolved = any(not b.resolved for br in orders for b in br)
    if unresolved:
        status = "unresolved"
    elif kappa is not None:
        status = "stabilized"
    else:
        status = "order-cap"
    return ConeResult(orders, kappa, status)


def _same_branches(A: list[ConeBranch], B: list[ConeBranch]) -> bool:
    if len(A) != len(B):
        return False
    used = set()
    for a in A:
        hit = next((k for k, b in enumerate(B) if k not in used and compare_spans(a.basis, b.basis) == "equal"), None)
        if hit is None:
            return False
        used.add(hit)
    return True


def compare_spans(A: Sequence[Sequence], B: Sequence[Sequence]) -> str:
    """``equal`` / ``subset`` (A in B) / ``superset`` / ``incomparable``."""
    def rank(vs):
        return rank_and_pivots(RatMatrix([[Q(x) for x in v] for v in vs]))[0] if vs else 0

    ra, rb = rank(A), rank(B)
    rab = rank(list(A) + list(B))
    if ra == rb == rab:
        return "equal"
    if rab == rb:
        return "subset"
    if rab == ra:
        return "superset"
    return "incomparable"


# ---------------------------------------------------------------------------
# rank stratification


@dataclass
class LkResult:
    k: int
    status: str  # "locally-empty" | "vacuous" | "computed"
    cone: ConeResult | None
    minors_vanish: bool | None
    mode: str
    checked_pairs: int = 0
    details: dict = field(default_factory=dict)


def lk_cone(
    m: LinkageModel,
    k: int,
    max_order: int,
    mode: str = "shortcut",
    samples: int = 500,
    seed: int = 0,
    cone: ConeResult | None = None,
    threads: int | None = None,
) -> LkResult:
    """Tangent cone of ``L_k`` (rank < k) via the vanishing of all k-minor derivatives.

    ``mode`` is ``shortcut`` (Smith valuations of J along branch jets),
    ``sampled`` (``samples`` random (alpha, beta) pairs) or ``full`` (all
    pairs, in parallel).
    """
    rows = 6 * m.gamma
    if k > rows:
        raise ConeError(f"rank threshold {k} exceeds 6*gamma = {rows}")
    if k < 1:
        raise ConeError("rank threshold must be positive")
    ctx = _context(m)
    if k <= ctx.rank:
        return LkResult(k, "locally-empty", None, None, mode)
    if k > min(rows, m.n):
        return LkResult(k, "vacuous", None, True, mode)
    if cone is None or len(cone.orders) < max_order + 1:
        cone = tangent_cone(m, max_order + 1, seed=seed)
    orders = []
    all_vanish = True
    checked = 0
    details = {}
    for i in range(1, max_order + 1):
        kept = []
        # witnesses certified one order deeper than tested, truncated to order i
        for bi, b in enumerate(cone.cone(min(i + 1, len(cone.orders)))):
            if b.dim == 0:
                kept.append(b)
                continue
            if mode == "shortcut":
                prof = jets.rank_along_jet(m, _Truncated(b, i), i, seed=seed)
                ok = prof.minors_vanish(k, i)
                details[(i, bi)] = prof.valuations
            elif mode in ("sampled", "full"):
                ok, n_checked = _check_minors(m, b, k, i, mode, samples, seed, threads)
                checked += n_checked
            else:
                raise ConeError(f"unknown minor mode {mode!r}")
            if ok:
                kept.append(b)
            else:
                all_vanish = False
                sub = ConeBranch(b.basis, b.witness, b.kernel, list(b.residuals), list(b.notes))
                sub.notes.append(f"order {i}: {k}-minor derivatives do not vanish identically; L_{k} cone is a proper subset")
                kept.append(sub)
        orders.append(kept)
    res = ConeResult(orders, cone.kappa, cone.status if all_vanish else "unresolved")
    return LkResult(k, "computed", res, all_vanish, mode, checked, details)


class _Truncated:
    def __init__(self, branch, order):
        self.branch, self.order = branch, order

    def sample_taylor(self, rng):
        return self.branch.sample_taylor(rng, self.order)


def _minor_job(args):
    m, taylor, order, pairs = args
    Js = jets.jacobian_series(m, taylor, order)
    from .exact import series_det

    bad = []
    for a, b in pairs:
        if not series_det(Js.submatrix(a, b)).is_zero():
            bad.append((a, b))
    return bad


def _check_minors(m, branch, k, order, mode, samples, seed, threads):
    rng = random.Random(seed)
    taylor = branch.sample_taylor(rng, order)
    rows = 6 * m.gamma
    if mode == "sampled":
        pairs = jets.random_index_sets(rows, m.n, k, samples, seed + k)
    else:
        pairs = list(jets.all_index_sets(rows, m.n, k))
    chunks = _chunk(pairs, max(1, (threads or 1) * 4))
    jobs = [(m, taylor, order, c) for c in chunks]
    bad = []
    if (threads or 1) > 1 and len(chunks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as ex:
            for res in ex.map(_minor_job, jobs):
                bad.extend(res)
    else:
        for job in jobs:
            bad.extend(_minor_job(job))
    return not bad, len(pairs)


def _chunk(items, parts):
    size = max(1, math.ceil(len(items) / parts))
    return [items[i : i + size] for i in range(0, len(items), size)]
