"""Higher-order loop-constraint and Jacobian-minor derivatives along formal motions.

A formal motion through q0 = 0 is ``q(t) = a_1 t + a_2 t^2 + ...`` with Taylor
coefficient vectors ``a_m = q^{(m)}(0) / m!``.  Public functions take and
return raw derivatives (``x = q'``, ``y = q''``, ...); the Taylor form is used
internally.

Two independent routes evaluate the constraint hierarchy:

* :func:`constraint_derivatives` propagates the instantaneous loop screws
  with the bracket recursion ``dS_k/dt = [V_k, S_k]``, ``V_k`` being the
  spatial velocity of the loop prefix before joint ``k``;
* :func:`series_oracle` multiplies truncated 4x4 exponential series and
  reads the twist ``f' f^{-1}`` off the product.

Both work with any ring scalars, so branch parameters can be carried as
:class:`~conekit.poly.Poly` values.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from . import screws
from .exact import ONE, ZERO, Jet, Q, SeriesMatrix, determinant, series_det, smith_valuations
from .model import LinkageModel


@dataclass(frozen=True)
class MotionJet:
    """Raw derivative vectors ``(q', q'', ..., q^{(i)})`` at q0."""

    derivatives: tuple

    def __init__(self, derivatives: Sequence[Sequence]):
        object.__setattr__(self, "derivatives", tuple(tuple(v) for v in derivatives))

    @property
    def order(self) -> int:
        return len(self.derivatives)

    @classmethod
    def zero(cls, n: int, order: int) -> "MotionJet":
        return cls([[ZERO] * n for _ in range(order)])

    @classmethod
    def from_taylor(cls, coeffs: Sequence[Sequence]) -> "MotionJet":
        return cls([[c * math.factorial(m) for c in vec] for m, vec in enumerate(coeffs, start=1)])

    def taylor(self) -> list[list]:
        """Taylor coefficient vectors ``a_1, a_2, ...``."""
        out = []
        for m, vec in enumerate(self.derivatives, start=1):
            f = math.factorial(m)
            out.append([v / f if not isinstance(v, float) else v / f for v in vec])
        return out


@dataclass
class ConstraintJetValue:
    """``H_l^{(1)}, ..., H_l^{(i)}`` (raw derivatives, 6-vectors) for each loop."""

    per_loop: list

    def is_zero(self) -> bool:
        return all(v == 0 for loop in self.per_loop for h in loop for v in h)

    def order(self) -> int:
        return len(self.per_loop[0]) if self.per_loop else 0


def _zero_like(v):
    return v * 0 if not isinstance(v, int) else ZERO


def _series_mul_scalar(vec_series, scal_series, length):
    """Cauchy product of a 6-vector series with a scalar series."""
    out = [[ZERO] * 6 for _ in range(length)]
    for b, vec in enumerate(vec_series[:length]):
        for c in range(min(len(scal_series), length - b)):
            s = scal_series[c]
            if s == 0:
                continue
            row = out[b + c]
            for r in range(6):
                if vec[r] != 0:
                    row[r] = row[r] + vec[r] * s
    return out


def _velocity_series(taylor, n, length):
    """Per-joint coefficients of ``q'(t)``: ``(m+1) a_{m+1}`` for m < length."""
    out = []
    for c in range(n):
        series = []
        for m in range(length):
            if m + 1 <= len(taylor):
                v = taylor[m][c]
                series.append(v * (m + 1) if v != 0 else ZERO)
            else:
                series.append(ZERO)
        out.append(series)
    return out


def loop_series(m: LinkageModel, l: int, taylor: Sequence[Sequence], degree: int):
    """Bracket recursion along loop ``l``.

    Returns ``(screw_series, velocity)`` where ``screw_series[k]`` holds the
    coefficients ``S_k[0..degree]`` of the k-th loop screw and ``velocity``
    the coefficients ``H_l^{(1)}[0..degree-1]`` of the loop twist
    ``f_l' f_l^{-1}``.
    """
    steps = m.loop_steps(l)
    qdot = _velocity_series(taylor, m.n, degree)
    V = [[ZERO] * 6 for _ in range(degree)]
    screw_series = []
    for j, sgn, c, Y in steps:
        S = [tuple(sgn * y for y in Y)]
        for mm in range(degree):
            acc = [ZERO] * 6
            for b in range(mm + 1):
                if all(v == 0 for v in V[b]):
                    continue
                br = screws.bracket(V[b], S[mm - b])
                acc = [x + y for x, y in zip(acc, br)]
            S.append(tuple(x / (mm + 1) if x != 0 else ZERO for x in acc))
        screw_series.append((j, sgn, c, S))
        contrib = _series_mul_scalar(S, qdot[c], degree)
        V = [[x + y for x, y in zip(v, w)] for v, w in zip(V, contrib)]
    return screw_series, V


def _check_order(j: MotionJet, i: int):
    if i < 0:
        raise ValueError("order must be non-negative")
    if j.order < i:
        raise ValueError(f"jet of order {j.order} cannot give constraint derivatives of order {i}")


def constraint_derivatives(m: LinkageModel, j: MotionJet, i: int) -> ConstraintJetValue:
    """``H_l^{(1)} .. H_l^{(i)}`` via the bracket recursion."""
    _check_order(j, i)
    taylor = j.taylor()
    out = []
    for l in range(m.gamma):
        _, V = loop_series(m, l, taylor, i)
        out.append([tuple(v * math.factorial(k) for v in V[k]) for k in range(i)])
    return ConstraintJetValue(out)


def constraint_coefficients(m: LinkageModel, taylor: Sequence[Sequence], degree: int) -> list[list]:
    """Stacked Taylor coefficients of ``H^{(1)}(t)`` for degrees ``0..degree-1``.

    Entry ``[k]`` is the 6*gamma vector of order-k coefficients.  Works with
    polynomial scalars; used by the cone refinement.
    """
    blocks = [loop_series(m, l, taylor, degree)[1] for l in range(m.gamma)]
    return [[v for l in range(m.gamma) for v in blocks[l][k]] for k in range(degree)]


# ---------------------------------------------------------------------------
# independent oracle: truncated products of 4x4 exponential series


def _mat_zero():
    return [[ZERO] * 4 for _ in range(4)]


def _mat_eye():
    return [[ONE if i == j else ZERO for j in range(4)] for i in range(4)]


def _mat_mul(A, B):
    out = _mat_zero()
    for i in range(4):
        for k in range(4):
            a = A[i][k]
            if a == 0:
                continue
            for j in range(4):
                b = B[k][j]
                if b != 0:
                    out[i][j] = out[i][j] + a * b
    return out


def _mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_scale(A, s):
    return [[a * s if a != 0 else ZERO for a in r] for r in A]


def _series_mat_mul(A, B, length):
    out = [_mat_zero() for _ in range(length)]
    for a in range(min(len(A), length)):
        for b in range(min(len(B), length - a)):
            out[a + b] = _mat_add(out[a + b], _mat_mul(A[a], B[b]))
    return out


def _scalar_series_mul(a, b, length):
    out = [ZERO] * length
    for i in range(min(len(a), length)):
        if a[i] == 0:
            continue
        for k in range(min(len(b), length - i)):
            if b[k] != 0:
                out[i + k] = out[i + k] + a[i] * b[k]
    return out


def exp_series(Y: Sequence, qseries: Sequence, length: int):
    """Coefficients of ``exp(hat(Y) q(t))`` for a scalar series with ``q(0) = 0``."""
    Yh = screws.hat(tuple(Q(v) for v in Y))
    out = [_mat_zero() for _ in range(length)]
    out[0] = _mat_eye()
    power = _mat_eye()
    qpow = [ONE] + [ZERO] * (length - 1)
    for k in range(1, length):
        power = _mat_mul(power, Yh)
        qpow = _scalar_series_mul(qpow, qseries, length)
        inv_fact = mpq(1, math.factorial(k))
        for d in range(length):
            if qpow[d] != 0:
                out[d] = _mat_add(out[d], _mat_scale(power, qpow[d] * inv_fact))
    return out


def loop_product_series(m: LinkageModel, l: int, taylor: Sequence[Sequence], length: int, inverse: bool = False):
    """Truncated series of ``f_l(q(t))`` (or of its inverse)."""
    steps = m.loop_steps(l)
    if inverse:
        steps = list(reversed(steps))
    f = [_mat_eye()] + [_mat_zero() for _ in range(length - 1)]
    for j, sgn, c, Y in steps:
        qs = [ZERO] + [taylor[k][c] if k < len(taylor) else ZERO for k in range(length - 1)]
        s = -sgn if inverse else sgn
        f = _series_mat_mul(f, exp_series(tuple(s * y for y in Y), qs, length), length)
    return f


@dataclass
class OracleValue:
    """Oracle output: constraint derivatives plus the raw deviation ``f_l - I``."""

    constraints: ConstraintJetValue
    deviation: list

    def vanishes_through(self, i: int) -> bool:
        return all(
            v == 0 for loop in self.deviation for coef in loop[1 : i + 1] for r in coef for v in r
        )


def series_oracle(m: LinkageModel, j: MotionJet, i: int) -> OracleValue:
    """Constraint derivatives read from exponential-series products."""
    _check_order(j, i)
    taylor = j.taylor()
    length = i + 1
    per_loop = []
    deviation = []
    for l in range(m.gamma):
        f = loop_product_series(m, l, taylor, length)
        finv = loop_product_series(m, l, taylor, length, inverse=True)
        fdot = [_mat_scale(f[k + 1], k + 1) for k in range(length - 1)]
        twist = _series_mat_mul(fdot, finv, length - 1)
        per_loop.append([tuple(v * math.factorial(k) for v in screws.vee(twist[k])) for k in range(i)])
        dev = [_mat_add(f[0], _mat_scale(_mat_eye(), -1))] + f[1:]
        deviation.append(dev)
    return OracleValue(ConstraintJetValue(per_loop), deviation)


# ---------------------------------------------------------------------------
# Jacobian along a motion and its minors


def jacobian_series(m: LinkageModel, taylor: Sequence[Sequence], degree: int) -> SeriesMatrix:
    """``J(q(t))`` truncated at ``degree`` with per-loop screws."""
    rows = [[[ZERO] * (degree + 1) for _ in range(m.n)] for _ in range(6 * m.gamma)]
    for l in range(m.gamma):
        screw_series, _ = loop_series(m, l, taylor, degree)
        for j, sgn, c, S in screw_series:
            for r in range(6):
                entry = rows[6 * l + r][c]
                for d in range(degree + 1):
                    entry[d] = entry[d] + S[d][r]
    return SeriesMatrix([[Jet(e) for e in row] for row in rows])


def _check_indices(m: LinkageModel, alpha, beta):
    if len(alpha) != len(beta):
        raise ValueError("row and column index sets differ in size")
    if any(not 0 <= a < 6 * m.gamma for a in alpha):
        raise IndexError(f"row index out of range 0..{6 * m.gamma - 1}")
    if any(not 0 <= b < m.n for b in beta):
        raise IndexError(f"column index out of range 0..{m.n - 1}")


def minor_derivatives(
    m: LinkageModel,
    j: MotionJet,
    alpha: Sequence[int],
    beta: Sequence[int],
    i: int,
    method: str = "elimination",
) -> list:
    """``M^{(0)}, ..., M^{(i)}`` of the minor with rows ``alpha``, columns ``beta`` (0-based).

    ``method="elimination"`` runs valuation-pivoted elimination on the series
    submatrix; ``method="expansion"`` sums determinants over all ways of
    distributing the derivative order across columns (multilinearity).
    """
    _check_indices(m, alpha, beta)
    _check_order(j, i)
    Js = jacobian_series(m, j.taylor(), i)
    sub = Js.submatrix(alpha, beta)
    if method == "elimination":
        coeffs = series_det(sub).coeffs
    elif method == "expansion":
        coeffs = _det_by_expansion(sub)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [c * math.factorial(k) for k, c in enumerate(coeffs)]


def _det_by_expansion(sub: SeriesMatrix) -> list:
    k = sub.rows
    order = sub.order
    coef_cols = [[sub.coefficient(d).column(c) for c in range(k)] for d in range(order + 1)]
    nonzero = [[any(v != 0 for v in coef_cols[d][c]) for c in range(k)] for d in range(order + 1)]
    out = []
    for total in range(order + 1):
        acc = ZERO
        for comp in _compositions(total, k):
            if not all(nonzero[d][c] for c, d in enumerate(comp)):
                continue
            cols = [coef_cols[d][c] for c, d in enumerate(comp)]
            acc += determinant([list(r) for r in zip(*cols)])
        out.append(acc)
    return out


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class RankProfile:
    """Smith valuations of ``J(q(t))`` at each sample and the derived verdicts."""

    order: int
    static_rank: int
    valuations: list  # one list per sample
    ranks: list  # ranks[m] = generic rank at truncation order m
    escalated: bool = False

    def constant(self) -> bool:
        return all(r == self.static_rank for r in self.ranks)

    def minors_vanish(self, k: int, order: int | None = None) -> bool:
        """All order-k minor derivatives vanish through ``order`` at every sample."""
        order = self.order if order is None else order
        for vals in self.valuations:
            if k > len(vals):
                continue
            if sum(vals[:k]) <= order:
                return False
        return True


def rank_profile_of(Js: SeriesMatrix) -> list[int]:
    return smith_valuations(Js)


ESCALATION_SAMPLES = 20


def rank_along_jet(m: LinkageModel, branch, order: int, samples: int = 5, seed: int = 0) -> RankProfile:
    """Generic rank of ``J(q(t))`` per truncation order along a cone branch.

    ``branch`` provides ``sample_taylor(rng)`` returning Taylor vectors
    of a motion solving the constraint hierarchy through ``order`` (or more).
    Parameters are substituted with ``samples`` random rationals from a
    seeded generator.  A nonzero polynomial is nonzero at a random point
    with overwhelming probability, and one nonzero sample already proves
    the generic rank rises.  Disagreeing samples mark the profile as
    escalated and trigger a larger batch of samples; the reported rank per
    order is the maximum seen.
    """
    from .exact import rank_and_pivots

    rng = random.Random(seed)
    static = rank_and_pivots(jacobian_series(m, [], 0).coefficient(0))[0]

    def draw(count):
        out = []
        for _ in range(count):
            taylor = branch.sample_taylor(rng)
            out.append(smith_valuations(jacobian_series(m, taylor, order)))
        return out

    def profile(vals):
        return [sum(1 for v in vals if v <= d) for d in range(order + 1)]

    all_vals = draw(samples)
    escalated = any(profile(v) != profile(all_vals[0]) for v in all_vals)
    if escalated:
        all_vals += draw(ESCALATION_SAMPLES)
    ranks = [max(p[d] for p in map(profile, all_vals)) for d in range(order + 1)]
    return RankProfile(order, static, all_vals, ranks, escalated)


def random_rational(rng: random.Random, span: int = 9) -> mpq:
    num = rng.randint(-span, span)
    den = rng.randint(1, span)
    return mpq(num, den)


def random_index_sets(rows: int, cols: int, k: int, count: int, seed: int) -> list[tuple[tuple, tuple]]:
    """``count`` distinct random (alpha, beta) pairs, deterministic in ``seed``."""
    rng = random.Random(seed)
    total = math.comb(rows, k) * math.comb(cols, k)
    count = min(count, total)
    seen = set()
    out = []
    while len(out) < count:
        a = tuple(sorted(rng.sample(range(rows), k)))
        b = tuple(sorted(rng.sample(range(cols), k)))
        if (a, b) not in seen:
            seen.add((a, b))
            out.append((a, b))
    return out


def all_index_sets(rows: int, cols: int, k: int):
    """Every (alpha, beta) pair in lexicographic order."""
    for a in itertools.combinations(range(rows), k):
        for b in itertools.combinations(range(cols), k):
            yield a, b
