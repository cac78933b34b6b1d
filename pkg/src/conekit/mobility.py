"""DOF figures and singularity classification at the reference configuration."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import continuation
from .cones import DEFAULT_ORDER_CAP, ConeResult, _context, lk_cone, tangent_cone
from .model import LinkageModel
from .taylor import compare_chain


class InternalError(RuntimeError):
    """Analysis inputs contradict each other."""


@dataclass(frozen=True)
class Flag:
    value: bool | None  # None: undecided
    caveats: tuple = ()

    def text(self) -> str:
        word = {True: "yes", False: "no", None: "undecided"}[self.value]
        return word + (f" [{', '.join(self.caveats)}]" if self.caveats else "")


@dataclass
class MobilityReport:
    name: str
    n: int
    N: int
    gamma: int
    static_rank: int
    delta_diff: int
    cone_dims: list  # per order, dims of the branches
    kappa: int | None
    cone_status: str
    delta_loc: int
    delta_loc_status: str  # "confirmed" | "lower bound"
    vk_verdicts: dict
    rank_verdicts: dict  # k -> "constant" | "rises" | "vacuous" | "unresolved"
    rank_locally_constant: bool | None
    delta_top: int
    shaky_degree: int | None
    overconstraint_degree: int
    constraint_singular: Flag
    kinematic_singular: Flag
    cspace_singular: Flag
    continuation: dict = field(default_factory=dict)

    @property
    def rigid(self) -> bool:
        return self.delta_loc == 0 and self.delta_loc_status == "confirmed"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vk_verdicts"] = {str(k): v for k, v in self.vk_verdicts.items()}
        d["rank_verdicts"] = {str(k): v for k, v in self.rank_verdicts.items()}
        for key in ("constraint_singular", "kinematic_singular", "cspace_singular"):
            flag = getattr(self, key)
            d[key] = {"value": flag.value, "caveats": list(flag.caveats)}
        d["rigid"] = self.rigid
        return d


def ckg_dof(m: LinkageModel) -> int:
    """Topological (Chebychev-Kutzbach-Gruebler) DOF ``n - 6 gamma``."""
    return m.n - 6 * m.gamma


def thread_count() -> int:
    raw = os.environ.get("CONEKIT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"CONEKIT_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"CONEKIT_THREADS must be a positive integer, got {raw!r}")
    return value


def continuation_check(m: LinkageModel, cone: ConeResult, seed: int, paths: int = 3, steps: int = 10, h: float = 0.02):
    """Trace random directions of each terminal branch; all must complete at the static rank."""
    rng = np.random.default_rng(seed)
    rank = _context(m).rank
    outcomes = []
    for b in cone.terminal:
        if b.dim == 0:
            continue
        B = np.array([[float(x) for x in v] for v in b.basis])
        for _ in range(paths):
            d = rng.standard_normal(b.dim) @ B
            d /= np.linalg.norm(d)
            tr = continuation.trace_path(m, d, steps, h)
            outcomes.append(
                {
                    "completed": tr.completed,
                    "max_residual": tr.max_residual(),
                    "ranks": sorted(set(tr.ranks())),
                }
            )
    ok = all(o["completed"] and o["ranks"] == [rank] for o in outcomes)
    return {"paths": len(outcomes), "agrees": ok, "outcomes": outcomes}


def classify(
    m: LinkageModel,
    cone: ConeResult,
    lk: dict,
    vk_verdicts: dict,
    trace_evidence: dict | None,
) -> MobilityReport:
    """Combine the exact analyses (and the numerical evidence) into a report."""
    ctx = _context(m)
    rank = ctx.rank
    delta_diff = m.n - rank
    terminal = cone.terminal
    delta_loc = max((b.dim for b in terminal), default=0)
    if delta_loc > delta_diff:
        raise InternalError(f"cone dimension {delta_loc} exceeds dim ker J = {delta_diff}")
    for i in range(1, len(cone.orders)):
        for b in cone.orders[i]:
            if b.dim > max(a.dim for a in cone.orders[i - 1]):
                raise InternalError(f"K^{i + 1} has a branch larger than K^{i}")

    rank_verdicts = {}
    for k, res in sorted(lk.items()):
        if res.status == "vacuous":
            rank_verdicts[k] = "vacuous"
        elif res.status == "locally-empty":
            raise InternalError(f"L_{k} reported locally empty above the static rank")
        elif res.minors_vanish:
            rank_verdicts[k] = "constant"
        elif cone.status == "unresolved":
            rank_verdicts[k] = "unresolved"
        else:
            rank_verdicts[k] = "rises"
    if any(v == "rises" for v in rank_verdicts.values()):
        rank_constant = False
    elif any(v == "unresolved" for v in rank_verdicts.values()) or cone.status == "unresolved":
        rank_constant = None
    else:
        rank_constant = True

    vk_ok = bool(vk_verdicts) and all(v == "equal" for v in vk_verdicts.values())
    trace_ok = trace_evidence is not None and trace_evidence.get("agrees", False)
    confirmed = vk_ok and trace_ok and cone.status == "stabilized"
    delta_top = ckg_dof(m)

    constraint = Flag(rank < min(6 * m.gamma, m.n), ("exact-rank",))
    kin_caveats = ["smooth-motions-only"]
    if rank_constant is True and cone.status == "stabilized":
        kinematic = Flag(False, tuple(kin_caveats))
    elif rank_constant is False:
        kinematic = Flag(True, tuple(kin_caveats))
    else:
        kinematic = Flag(None, tuple(kin_caveats + ["unresolved-cone"]))
    cs_caveats = ["cusps-not-captured-by-tangent-cone"]
    single = len(terminal) == 1 and terminal[0].resolved
    vk_kappa = vk_verdicts.get(cone.kappa) if cone.kappa else None
    if len([b for b in terminal if b.resolved]) > 1:
        cspace = Flag(True, tuple(cs_caveats + ["multiple-branches"]))
    elif single and vk_kappa == "equal" and cone.status == "stabilized":
        cspace = Flag(False, tuple(cs_caveats + ["taylor-cross-check-equal"]))
    else:
        extra = "taylor-cross-check-" + (vk_kappa or "missing")
        cspace = Flag(None, tuple(cs_caveats + [extra]))

    return MobilityReport(
        name=m.name,
        n=m.n,
        N=len(m.graph.vertices),
        gamma=m.gamma,
        static_rank=rank,
        delta_diff=delta_diff,
        cone_dims=cone.dims(),
        kappa=cone.kappa,
        cone_status=cone.status,
        delta_loc=delta_loc,
        delta_loc_status="confirmed" if confirmed else "lower bound",
        vk_verdicts=dict(vk_verdicts),
        rank_verdicts=rank_verdicts,
        rank_locally_constant=rank_constant,
        delta_top=delta_top,
        shaky_degree=delta_diff - delta_loc if rank_constant else None,
        overconstraint_degree=delta_loc - delta_top,
        constraint_singular=constraint,
        kinematic_singular=kinematic,
        cspace_singular=cspace,
        continuation=dict(trace_evidence or {}),
    )


def analyze(
    m: LinkageModel,
    order_cap: int = DEFAULT_ORDER_CAP,
    minor_mode: str = "shortcut",
    seed: int = 0,
    lk_order: int | None = None,
    trace: bool = True,
) -> MobilityReport:
    """Full pipeline: cone chain, rank stratification, Taylor cross-check, continuation."""
    if order_cap < 2:
        raise ValueError("order cap must be at least 2")
    cone = tangent_cone(m, order_cap, seed=seed)
    lk_order = lk_order or order_cap - 1
    rank = _context(m).rank
    threads = thread_count() if minor_mode == "full" else 1
    lk = {
        k: lk_cone(m, k, lk_order, mode=minor_mode, seed=seed, cone=cone, threads=threads)
        for k in range(rank + 1, 6 * m.gamma + 1)
    }
    kmax = cone.kappa or len(cone.orders)
    vk = compare_chain(m, cone, range(1, kmax + 1))
    evidence = continuation_check(m, cone, seed) if trace else None
    return classify(m, cone, lk, vk, evidence)


def format_report(r: MobilityReport) -> str:
    lines = [
        f"model: {r.name}",
        f"n={r.n} N={r.N} gamma={r.gamma}",
        f"rank(J)={r.static_rank}",
        f"delta_diff={r.delta_diff}",
    ]
    for i, dims in enumerate(r.cone_dims, start=1):
        lines.append(f"dim K^{i}=" + ",".join(str(d) for d in dims))
    lines.append(f"kappa={r.kappa if r.kappa is not None else 'none'} ({r.cone_status})")
    for k, v in r.vk_verdicts.items():
        lines.append(f"V^{k} vs K^{k}: {v}")
    for k, v in r.rank_verdicts.items():
        lines.append(f"L_{k}: {v}")
    rc = {True: "yes", False: "no", None: "undecided"}[r.rank_locally_constant]
    lines.append(f"rank locally constant: {rc}")
    lines.append(f"delta_loc={r.delta_loc} ({r.delta_loc_status})")
    lines.append(f"delta_top={r.delta_top}")
    if r.shaky_degree is None:
        lines.append("shaky degree=undecided")
    elif r.shaky_degree > 0:
        lines.append(f"shaky degree={r.shaky_degree}")
    else:
        lines.append("shaky degree=0 (not shaky)")
    if r.overconstraint_degree > 0:
        lines.append(f"overconstrained degree={r.overconstraint_degree}")
    else:
        lines.append(f"overconstrained degree={r.overconstraint_degree} (not overconstrained)")
    lines.append(f"constraint-singular: {r.constraint_singular.text()}")
    lines.append(f"kinematic-singular: {r.kinematic_singular.text()}")
    lines.append(f"c-space-singular: {r.cspace_singular.text()}")
    if r.continuation:
        lines.append(f"continuation: {r.continuation['paths']} paths, agrees={r.continuation['agrees']}")
    if r.delta_loc == 0:
        lines.append("rigid structure (delta_loc=0)")
    return "\n".join(lines) + "\n"
