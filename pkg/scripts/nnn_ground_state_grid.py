#!/usr/bin/env python3
"""Ground-state excess-entropy grid for the next-nearest-neighbor chain.

Sweeps (J1, J2) at fixed field with the zero-temperature stand-in and
writes per-point metrics; the E_mu column maps the ordered phases. Points
sitting exactly on a phase boundary report the coexistence machine rather
than a single phase.
"""

import argparse

from spinmech.analysis import format_csv, run_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-o", "--out", default="nnn_ground_state_grid.csv")
    parser.add_argument("--points", type=int, default=41, help="grid points per axis")
    parser.add_argument("--j-range", type=float, default=2.0)
    parser.add_argument("--field", type=float, default=0.0)
    parser.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args()

    config = {
        "model": {"preset": "nnn"},
        "parameters": {"beta": "inf", "B": args.field},
        "sweep": {
            "mode": "grid",
            "parameters": {
                "J1": {"low": -args.j_range, "high": args.j_range, "count": args.points},
                "J2": {"low": -args.j_range, "high": args.j_range, "count": args.points},
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
