#!/usr/bin/env python3
"""Tabulate the largest certifiable commutator bound across family sizes.

Emits three CSVs under results/, one per sweep: epsilon_bound against N for
varying m, varying norm bound M, and varying contraction factor rho.
"""
import argparse
import pathlib
import sys

from cyclecert import cli

ROOT = pathlib.Path(__file__).resolve().parent.parent

SWEEPS = [
    ("epsilon_vs_N_by_m.csv",
     ["--n-values", "2..10", "--m-values", "1..5",
      "--norm-bound-values", "2", "--rho-values", "0.9"]),
    ("epsilon_vs_N_by_M.csv",
     ["--n-values", "2..10", "--m-values", "5",
      "--norm-bound-values", "1,2,3,4", "--rho-values", "0.9"]),
    ("epsilon_vs_N_by_rho.csv",
     ["--n-values", "2..10", "--m-values", "5",
      "--norm-bound-values", "2", "--rho-values", "0.5,0.7,0.9,0.95"]),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default=str(ROOT / "results"))
    parser.add_argument("--gamma", type=float, default=0.0001)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, flags in SWEEPS:
        path = outdir / name
        code = cli.main(["epsilon-curves", "--gamma", str(args.gamma),
                         "--out", str(path)] + flags)
        if code != cli.EXIT_OK:
            print(f"sweep {name} exited with code {code}", file=sys.stderr)
            return code
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
