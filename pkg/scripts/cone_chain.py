"""Cone dimensions, stabilization order and runtime for every bundled fixture."""

import argparse
import time

from conekit import load_fixture, tangent_cone
from conekit.modelfile import FIXTURES


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    print(f"{'fixture':<18} {'dims':<30} {'kappa':>5}  status       time")
    for name in sorted(FIXTURES):
        m = load_fixture(name)
        t0 = time.perf_counter()
        res = tangent_cone(m, args.order, seed=args.seed)
        dt = time.perf_counter() - t0
        dims = " ".join("/".join(map(str, d)) for d in res.dims())
        print(f"{name:<18} {dims:<30} {str(res.kappa):>5}  {res.status:<12} {dt:.3f}s")


if __name__ == "__main__":
    main()
