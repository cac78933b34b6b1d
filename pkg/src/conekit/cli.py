"""Command-line entry point: ``conekit <command> MODEL [options]``.

Exit codes: 0 success, 2 usage or input error, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import continuation
from .cones import ConeError, _context, lk_cone, tangent_cone
from .exact import format_rational
from .mobility import InternalError, analyze, format_report, thread_count
from .modelfile import FIXTURES, ModelFileError, load_fixture, parse_model
from .taylor import compare_with_cone, vk_solve

EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(ValueError):
    pass


def resolve_model(spec: str):
    """Load a model file, falling back to bundled fixtures by (prefix of) name."""
    path = Path(spec)
    if path.exists():
        return parse_model(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    matches = [name for name in FIXTURES if name == stem or name.startswith(stem)]
    if len(matches) == 1:
        return load_fixture(matches[0])
    raise UsageError(f"no model file or unique bundled fixture matches {spec!r}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conekit", description="Local mobility analysis of multiloop linkages.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", help="model JSON file or bundled fixture name")
    common.add_argument("--json", action="store_true", help="emit a machine-readable document")
    common.add_argument("--seed", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("rank", parents=[common], help="static Jacobian and its rank")
    c = sub.add_parser("cone", parents=[common], help="tangent cone chain")
    c.add_argument("--order", type=_positive, default=None)
    lk = sub.add_parser("lk", parents=[common], help="rank-stratified cone of L_k")
    lk.add_argument("--k", type=_positive, required=True)
    lk.add_argument("--order", type=_positive, default=4)
    lk.add_argument("--minors", choices=("shortcut", "sampled", "full"), default=None)
    t = sub.add_parser("taylor", parents=[common], help="Taylor approximation V^k")
    t.add_argument("--order", type=_positive, default=2)
    tr = sub.add_parser("trace", parents=[common], help="numerical path from q0")
    tr.add_argument("--direction", required=True, help="comma-separated vector, 'cone:I:J' or 'random:I'")
    tr.add_argument("--steps", type=_positive, default=50)
    tr.add_argument("--h", type=_positive_float, default=0.02)
    r = sub.add_parser("report", parents=[common], help="full mobility report")
    r.add_argument("--order", type=_positive, default=None)
    r.add_argument("--minors", choices=("shortcut", "sampled", "full"), default=None)
    r.add_argument("--no-trace", action="store_true", help="skip the continuation cross-check")
    return p


def _vec(v) -> list[str]:
    return [format_rational(x) for x in v]


def cmd_rank(m, args):
    ctx = _context(m)
    J = ctx.J
    doc = {
        "n": m.n,
        "gamma": m.gamma,
        "rows": J.rows,
        "cols": J.cols,
        "rank": ctx.rank,
        "kernel_dim": len(ctx.kernel),
        "jacobian": [_vec(row) for row in J.tolist()],
    }
    text = [f"J is {J.rows}x{J.cols}", f"rank(J)={ctx.rank}", f"dim ker J={len(ctx.kernel)}"]
    return doc, "\n".join(text) + "\n"


def _branch_doc(b):
    return {
        "dim": b.dim,
        "basis": [_vec(v) for v in b.basis],
        "certified_order": b.certified,
        "resolved": b.resolved,
        "notes": list(b.notes),
        "residuals": [str(p) for p in b.residuals],
    }


def cmd_cone(m, args):
    order = args.order or int(m.defaults.get("order_cap", 6))
    res = tangent_cone(m, order, seed=args.seed)
    doc = {
        "orders": [[_branch_doc(b) for b in br] for br in res.orders],
        "kappa": res.kappa,
        "status": res.status,
    }
    lines = []
    for i, br in enumerate(res.orders, start=1):
        lines.append(f"dim K^{i}=" + ",".join(str(b.dim) for b in br))
    lines.append(f"kappa={res.kappa if res.kappa is not None else 'none'} ({res.status})")
    for k, b in enumerate(res.terminal):
        lines.append(f"branch {k}: basis")
        lines.extend("  (" + ", ".join(_vec(v)) + ")" for v in b.basis)
    return doc, "\n".join(lines) + "\n"


def cmd_lk(m, args):
    mode = args.minors or m.defaults.get("minor_mode", "shortcut")
    res = lk_cone(m, args.k, args.order, mode=mode, seed=args.seed, threads=thread_count() if mode == "full" else 1)
    doc = {"k": res.k, "status": res.status, "mode": mode, "minors_vanish": res.minors_vanish, "checked_pairs": res.checked_pairs}
    if res.cone is not None:
        doc["orders"] = [[_branch_doc(b) for b in br] for br in res.cone.orders]
    verdict = {True: "all minor derivatives vanish", False: "minor derivatives do not vanish", None: "n/a"}[res.minors_vanish]
    text = f"L_{res.k} ({mode}, order {args.order}): {res.status}; {verdict}\n"
    return doc, text


def cmd_taylor(m, args):
    sys_ = vk_solve(m, args.order)
    cone = tangent_cone(m, args.order, seed=args.seed)
    verdict = compare_with_cone(sys_, cone.cone(args.order))
    doc = {
        "order": args.order,
        "branches": [{"dim": b.dim, "basis": [_vec(v) for v in b.basis], "resolved": b.resolved} for b in sys_.branches],
        "compare_with_cone": verdict,
    }
    text = f"dim V^{args.order}=" + ",".join(str(d) for d in sys_.dims()) + f"\nV^{args.order} vs K^{args.order}: {verdict}\n"
    return doc, text


def parse_direction(m, spec: str, seed: int) -> np.ndarray:
    if spec.startswith("cone:") or spec.startswith("random:"):
        parts = spec.split(":")
        try:
            order = int(parts[1])
            index = int(parts[2]) if parts[0] == "cone" else None
        except (IndexError, ValueError):
            raise UsageError(f"malformed direction {spec!r}") from None
        if order < 1:
            raise UsageError("cone order must be positive")
        branch = tangent_cone(m, order, seed=seed).cone(order)[0]
        B = np.array([[float(x) for x in v] for v in branch.basis]).reshape(branch.dim, m.n)
        if index is None:
            if branch.dim == 0:
                return np.zeros(m.n)
            d = np.random.default_rng(seed).standard_normal(branch.dim) @ B
        else:
            if not 0 <= index < branch.dim:
                raise UsageError(f"basis index {index} out of range for a {branch.dim}-dim branch")
            d = B[index]
    else:
        try:
            d = np.array([float(x) for x in spec.split(",")])
        except ValueError:
            raise UsageError(f"malformed direction {spec!r}") from None
        if d.shape != (m.n,):
            raise UsageError(f"direction needs {m.n} components, got {d.size}")
    nrm = np.linalg.norm(d)
    return d / nrm if nrm > 0 else d


def cmd_trace(m, args):
    d = parse_direction(m, args.direction, args.seed)
    tr = continuation.trace_path(m, d, args.steps, args.h)
    doc = {
        "status": tr.status,
        "failed_step": tr.failed_step,
        "max_residual": tr.max_residual(),
        "ranks": tr.ranks(),
        "samples": [{"q": s.q.tolist(), "residuals": s.residuals, "rank": s.rank, "gap": s.gap} for s in tr.samples],
    }
    ranks = sorted(set(tr.ranks()))
    text = (
        f"status={tr.status}" + (f" at step {tr.failed_step}" if tr.failed_step else "") + "\n"
        f"samples={len(tr.samples)} max residual={tr.max_residual():.3e} ranks={ranks}\n"
    )
    return doc, text


def cmd_report(m, args):
    order = args.order or int(m.defaults.get("order_cap", 6))
    if order < 2:
        raise UsageError("report needs --order of at least 2")
    mode = args.minors or m.defaults.get("minor_mode", "shortcut")
    rep = analyze(m, order_cap=order, minor_mode=mode, seed=args.seed, trace=not args.no_trace)
    return rep.to_dict(), format_report(rep)


COMMANDS = {
    "rank": cmd_rank,
    "cone": cmd_cone,
    "lk": cmd_lk,
    "taylor": cmd_taylor,
    "trace": cmd_trace,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        m = resolve_model(args.model)
        if args.seed is None:
            args.seed = int(m.defaults.get("seed", 0))
        doc, text = COMMANDS[args.command](m, args)
    except (UsageError, ModelFileError, ConeError, ValueError) as exc:
        print(f"conekit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InternalError, AssertionError) as exc:
        print(f"conekit: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.json:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    else:
        sys.stdout.write(text)
    return 0


def _json_default(o):
    if isinstance(o, float) and not np.isfinite(o):
        return str(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    return str(o)


if __name__ == "__main__":
    sys.exit(main())
