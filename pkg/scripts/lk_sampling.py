"""Agreement and cost of the three minor-checking modes for L_k."""

import argparse
import time

from conekit import lk_cone, load_fixture, tangent_cone


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default="fayet_wohlhart")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    m = load_fixture(args.model)
    cone = tangent_cone(m, args.order + 1, seed=args.seed)
    rank = m.n - cone.dims()[0][0]
    for k in range(rank + 1, min(6 * m.gamma, m.n) + 1):
        for mode in ("shortcut", "sampled"):
            t0 = time.perf_counter()
            res = lk_cone(m, k, args.order, mode=mode, samples=args.samples, seed=args.seed, cone=cone)
            dt = time.perf_counter() - t0
            print(f"k={k:<3} {mode:<9} vanish={res.minors_vanish!s:<5} pairs={res.checked_pairs:<6} {dt:.2f}s")


if __name__ == "__main__":
    main()
