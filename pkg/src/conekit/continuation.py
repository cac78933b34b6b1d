"""Floating-point path tracing on the configuration variety.

Predictor-corrector continuation used as an independent numerical oracle
for the exact pipeline: traced paths must close all loops and keep the
numeric rank of J, while directions that are first-order but not tangent
to any finite motion leave a residual floor the corrector cannot remove.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import LinkageModel, float_screws, jacobian_at, residual_vector

TOLERANCE = 1e-12
MAX_ITERATIONS = 25
DAMPING = 1e-10
RANK_RATIO = 1e-8
WITNESS_STEPS = (1e-2, 1e-3, 1e-4)


def numeric_rank(M, rel_tol: float = RANK_RATIO) -> int:
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("relative tolerance must lie in (0, 1)")
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def _rank_gap(M, rank: int) -> float:
    """Smallest retained over largest discarded singular value (inf if none discarded)."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if rank == 0 or rank >= s.size:
        return math.inf
    return float(s[rank - 1] / s[rank]) if s[rank] > 0 else math.inf


@dataclass
class Sample:
    q: np.ndarray
    residuals: list  # per-loop closure residual norms
    rank: int
    gap: float

    @property
    def residual(self) -> float:
        return float(math.sqrt(sum(r * r for r in self.residuals)))


@dataclass
class PathTrace:
    samples: list = field(default_factory=list)
    status: str = "completed"
    failed_step: int | None = None

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def max_residual(self) -> float:
        return max((s.residual for s in self.samples), default=0.0)

    def ranks(self) -> list[int]:
        return [s.rank for s in self.samples]


def correct(m: LinkageModel, q: np.ndarray, Y=None, tol: float = TOLERANCE, max_iter: int = MAX_ITERATIONS):
    """Damped least-squares Newton iteration on the stacked loop residuals.

    Each step ``-J^T (J J^T + damping I)^{-1} r`` is the minimum-norm
    update, so it is orthogonal to the numerical null space of J.
    Returns ``(q, residual norm, iterations, converged)``.
    """
    if Y is None:
        Y = float_screws(m)
    q = np.array(q, dtype=float)
    r = residual_vector(m, q, Y)
    norm = float(np.linalg.norm(r))
    it = 0
    while norm > tol and it < max_iter:
        J = jacobian_at(m, q, Y)
        A = J @ J.T + DAMPING * np.eye(J.shape[0])
        q = q - J.T @ np.linalg.solve(A, r)
        r = residual_vector(m, q, Y)
        new = float(np.linalg.norm(r))
        it += 1
        if not math.isfinite(new) or new > 1e3:
            return q, new, it, False
        norm = new
    return q, norm, it, norm <= tol


def _wrap(m: LinkageModel, q: np.ndarray) -> np.ndarray:
    out = q.copy()
    for c, j in enumerate(m.joints):
        if j.kind == "revolute":
            out[c] = (out[c] + math.pi) % (2 * math.pi) - math.pi
    return out


def _sample(m, q, Y) -> Sample:
    r = residual_vector(m, q, Y)
    J = jacobian_at(m, q, Y)
    rank = numeric_rank(J)
    res = [float(np.linalg.norm(r[6 * l : 6 * l + 6])) for l in range(m.gamma)]
    return Sample(_wrap(m, q), res, rank, _rank_gap(J, rank))


def trace_path(m: LinkageModel, direction: Sequence[float], steps: int, h: float) -> PathTrace:
    """Trace ``steps`` predictor-corrector steps of length ``h`` from q0.

    The first predictor follows ``direction``; later ones follow the secant
    through the last two samples.  Corrector failure ends the trace with
    status ``corrector-diverged``.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    d = np.asarray(direction, dtype=float)
    if d.shape != (m.n,):
        raise ValueError(f"direction must have {m.n} components")
    nrm = np.linalg.norm(d)
    if nrm > 0 and abs(nrm - 1.0) > 1e-9:
        raise ValueError("direction must be normalized")
    Y = float_screws(m)
    q = np.zeros(m.n)
    trace = PathTrace([_sample(m, q, Y)])
    tangent = d
    for k in range(1, steps + 1):
        pred = q + h * tangent
        qn, res, _, ok = correct(m, pred, Y)
        if not ok:
            trace.status = "corrector-diverged"
            trace.failed_step = k
            break
        if nrm > 0:
            sec = qn - q
            sn = np.linalg.norm(sec)
            tangent = sec / sn if sn > 0 else tangent
        q = qn
        trace.samples.append(_sample(m, q, Y))
    return trace


@dataclass
class WitnessResult:
    """Outcome of the non-continuability check for one direction."""

    floors: dict  # h -> residual after the corrector
    deviations: dict  # h -> |q_corrected - h d| / h
    numeric_failure: bool
    in_cone: bool | None
    non_continuable: bool


def shakiness_witness(m: LinkageModel, direction: Sequence[float], in_cone: bool | None) -> WitnessResult:
    """Check a direction for non-continuability.

    The corrector is confined to the orthogonal complement of the
    direction (pseudo-arclength hyperplane).  A direction counts as
    numerically non-continuable when, at every step size in
    ``WITNESS_STEPS``, the corrector fails or lands at a point whose offset
    from the line does not shrink relative to h.  The verdict additionally
    requires exact non-membership (``in_cone is False``); numerics alone
    never overrule the exact pipeline.
    """
    Y = float_screws(m)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    floors, devs = {}, {}
    fails = []
    for h in WITNESS_STEPS:
        q, res, _, ok = _correct_in_hyperplane(m, h * d, d, Y)
        floors[h] = res
        dev = float(np.linalg.norm(q - h * d) / h)
        devs[h] = dev
        fails.append((not ok) or dev > 0.5)
    numeric = all(fails)
    return WitnessResult(floors, devs, numeric, in_cone, numeric and in_cone is False)


def _correct_in_hyperplane(m, q, d, Y, tol=TOLERANCE, max_iter=MAX_ITERATIONS):
    P = np.eye(m.n) - np.outer(d, d)
    q = np.array(q, dtype=float)
    r = residual_vector(m, q, Y)
    norm = float(np.linalg.norm(r))
    it = 0
    while norm > tol and it < max_iter:
        J = jacobian_at(m, q, Y) @ P
        A = J @ J.T + DAMPING * np.eye(J.shape[0])
        q = q - J.T @ np.linalg.solve(A, r)
        r = residual_vector(m, q, Y)
        norm = float(np.linalg.norm(r))
        it += 1
        if not math.isfinite(norm) or norm > 1e3:
            return q, norm, it, False
    return q, norm, it, norm <= tol


def path_tangent(trace: PathTrace, steps: int = 1) -> np.ndarray:
    """Normalized secant from q0 to the ``steps``-th sample."""
    v = trace.samples[steps].q - trace.samples[0].q
    return v / np.linalg.norm(v)


def distance_to_span(v: np.ndarray, basis: Sequence[Sequence]) -> float:
    """Distance of unit ``v`` to ``span(basis)``."""
    if not len(basis):
        return float(np.linalg.norm(v))
    B = np.array([[float(x) for x in b] for b in basis]).T
    coef, *_ = np.linalg.lstsq(B, v, rcond=None)
    return float(np.linalg.norm(B @ coef - v))
