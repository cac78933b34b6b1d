"""Closure residuals along K^2 directions versus K^1\\K^2 directions, swept over step size."""

import argparse

import numpy as np

from conekit import load_fixture, tangent_cone, trace_path
from conekit.continuation import shakiness_witness


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default="fayet_wohlhart")
    p.add_argument("--directions", type=int, default=5)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    m = load_fixture(args.model)
    cone = tangent_cone(m, 3, seed=args.seed)
    K1 = np.array([[float(x) for x in v] for v in cone.cone(1)[0].basis])
    K2 = np.array([[float(x) for x in v] for v in cone.terminal[0].basis])
    Q2 = np.linalg.qr(K2.T)[0] if len(K2) else np.zeros((m.n, 0))
    rng = np.random.default_rng(args.seed)

    print("terminal cone directions")
    for h in (0.05, 0.02, 0.005):
        worst, done = 0.0, 0
        for _ in range(args.directions):
            d = rng.standard_normal(len(K2)) @ K2
            tr = trace_path(m, d / np.linalg.norm(d), args.steps, h)
            done += tr.completed
            worst = max(worst, tr.max_residual())
        print(f"  h={h:<6} completed {done}/{args.directions}  max residual {worst:.2e}")

    if len(K1) == len(K2):
        return
    print("first-order-only directions (corrector confined to the normal hyperplane)")
    for _ in range(args.directions):
        d = rng.standard_normal(len(K1)) @ K1
        d -= Q2 @ (Q2.T @ d)
        w = shakiness_witness(m, d / np.linalg.norm(d), in_cone=False)
        floors = "  ".join(f"h={h:g}: {f:.1e}" for h, f in sorted(w.floors.items(), reverse=True))
        ratio = "  ".join(f"{x:.2f}" for x in w.deviations.values())
        print(f"  floors {floors}  deviation/h {ratio}  non-continuable={w.non_continuable}")


if __name__ == "__main__":
    main()
