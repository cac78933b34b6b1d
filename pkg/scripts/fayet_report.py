"""Full mobility report for a fixture, optionally written as JSON."""

import argparse
import json
import time

from conekit import analyze, format_report, load_fixture


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default="fayet_wohlhart")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--seed", type=int, default=20200607)
    p.add_argument("--out", help="write the report document to this JSON file")
    args = p.parse_args()

    t0 = time.perf_counter()
    rep = analyze(load_fixture(args.model), order_cap=args.order, seed=args.seed)
    print(format_report(rep), end="")
    print(f"({time.perf_counter() - t0:.2f}s)")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rep.to_dict(), fh, indent=2, sort_keys=True, default=str)


if __name__ == "__main__":
    main()
