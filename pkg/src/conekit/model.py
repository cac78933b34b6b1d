"""Product-of-exponentials loop-closure model of a multiloop linkage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import screws
from .exact import RatMatrix, ZERO
from .topology import LinkageGraph, check_closure, cycle_space_dimension

JOINT_KINDS = ("revolute", "prismatic", "helical")


@dataclass(frozen=True)
class Joint:
    id: int
    screw: tuple
    kind: str = "helical"

    def __post_init__(self):
        if len(self.screw) != 6:
            raise ValueError(f"joint {self.id}: screw length {len(self.screw)} != 6")
        if self.kind not in JOINT_KINDS:
            raise ValueError(f"joint {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class LinkageModel:
    """Joints with reference screws at q0 = 0, the graph, and signed loops.

    Columns of every Jacobian follow the order of ``joints``.
    """

    joints: tuple
    graph: LinkageGraph
    loops: tuple
    name: str = "linkage"
    defaults: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ids = [j.id for j in self.joints]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate joint id")
        if sorted(ids) != sorted(e.joint for e in self.graph.edges):
            raise ValueError("joint ids do not match graph edges")
        for k, loop in enumerate(self.loops):
            for j, s in loop.steps:
                if j not in ids:
                    raise ValueError(f"loop {k + 1} references unknown joint {j}")
            check_closure(self.graph, loop)

    @property
    def n(self) -> int:
        return len(self.joints)

    @property
    def gamma(self) -> int:
        return len(self.loops)

    @property
    def joint_ids(self) -> tuple:
        return tuple(j.id for j in self.joints)

    def column(self, joint_id: int) -> int:
        return self.joint_ids.index(joint_id)

    def screw(self, joint_id: int) -> tuple:
        return self.joints[self.column(joint_id)].screw

    def loop_steps(self, l: int) -> list[tuple[int, int, int, tuple]]:
        """``(joint id, sign, column, reference screw)`` along loop ``l``."""
        out = []
        for j, s in self.loops[l].steps:
            c = self.column(j)
            out.append((j, s, c, self.joints[c].screw))
        return out

    def check_topology(self) -> int:
        gamma = cycle_space_dimension(self.graph)
        if gamma != self.gamma:
            raise ValueError(f"model lists {self.gamma} loops but the graph has {gamma} independent cycles")
        return gamma


def loop_screws(m: LinkageModel, l: int) -> list[tuple[int, int, tuple]]:
    """Instantaneous loop screws at q0: prefix transforms are identities there."""
    if not 0 <= l < m.gamma:
        raise IndexError(f"loop index {l} out of range")
    return [(j, s, screws.scale(Y, s)) for j, s, _, Y in m.loop_steps(l)]


def jacobian(m: LinkageModel) -> RatMatrix:
    """Stacked 6*gamma x n constraint Jacobian at q0."""
    rows = [[ZERO] * m.n for _ in range(6 * m.gamma)]
    for l in range(m.gamma):
        for j, s, c, Y in m.loop_steps(l):
            for r in range(6):
                rows[6 * l + r][c] = rows[6 * l + r][c] + s * Y[r]
    return RatMatrix(rows, cols=m.n)


# ---------------------------------------------------------------------------
# float evaluation off q0


def float_screws(m: LinkageModel) -> np.ndarray:
    return np.array([[float(v) for v in j.screw] for j in m.joints])


def loop_pose(m: LinkageModel, l: int, q: Sequence[float], Y: np.ndarray | None = None):
    if Y is None:
        Y = float_screws(m)
    g = screws.Pose.identity()
    for j, s, c, _ in m.loop_steps(l):
        g = g @ screws.exp_twist(s * Y[c], float(q[c]))
    return g


def jacobian_at(m: LinkageModel, q: Sequence[float], Y: np.ndarray | None = None) -> np.ndarray:
    """Float Jacobian with per-loop prefix-transformed screws."""
    if Y is None:
        Y = float_screws(m)
    q = np.asarray(q, dtype=float)
    J = np.zeros((6 * m.gamma, m.n))
    for l in range(m.gamma):
        g = screws.Pose.identity()
        for j, s, c, _ in m.loop_steps(l):
            Ys = s * Y[c]
            J[6 * l : 6 * l + 6, c] += screws.adjoint(g) @ Ys
            g = g @ screws.exp_twist(Ys, q[c])
    return J


def residual_vector(m: LinkageModel, q: Sequence[float], Y: np.ndarray | None = None) -> np.ndarray:
    """Stacked ``log f_l(q)`` twists (zero on the configuration variety)."""
    if Y is None:
        Y = float_screws(m)
    return np.concatenate([screws.log_pose(loop_pose(m, l, q, Y)) for l in range(m.gamma)])


def closure_residual(m: LinkageModel, q: Sequence[float]) -> list[float]:
    """Per-loop norm of ``log f_l(q)``."""
    r = residual_vector(m, q)
    return [float(np.linalg.norm(r[6 * l : 6 * l + 6])) for l in range(m.gamma)]
