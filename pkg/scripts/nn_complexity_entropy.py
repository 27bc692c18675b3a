#!/usr/bin/env python3
"""Complexity-entropy diagram data for the nearest-neighbor chain.

Draws random (beta, J, B) points, runs the full machine reconstruction at
each, and writes one CSV row per point. Plot h_mu against E_mu (or C_mu)
from the output to get the scatter diagram.
"""

import argparse

from spinmech.analysis import format_csv, run_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-o", "--out", default="nn_complexity_entropy.csv")
    parser.add_argument("--points", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=2025)
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--beta-low", type=float, default=1e-4)
    parser.add_argument("--beta-high", type=float, default=1e2)
    parser.add_argument("--j-range", type=float, default=1.5)
    parser.add_argument("--b-range", type=float, default=3.0)
    args = parser.parse_args()

    config = {
        "model": {"preset": "nn"},
        "parameters": {},
        "sweep": {
            "mode": "random",
            "count": args.points,
            "seed": args.seed,
            "parameters": {
                "beta": {"low": args.beta_low, "high": args.beta_high, "scale": "log"},
                "J": {"low": -args.j_range, "high": args.j_range},
                "B": {"low": -args.b_range, "high": args.b_range},
            },
        },
    }
    names, rows = run_sweep(config, jobs=args.jobs)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_csv(names, rows))
    ok = sum(1 for row in rows if row["status"] == "ok")
    print(f"{ok}/{len(rows)} points ok -> {args.out}")


if __name__ == "__main__":
    main()
