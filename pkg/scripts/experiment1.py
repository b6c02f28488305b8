#!/usr/bin/env python3
"""Certify the two-subsystem benchmark family and check the decay bound.

Writes the certificate report, the norm-envelope CSV, and the simulation
report under results/.
"""
import argparse
import pathlib
import sys

from cyclecert import cli

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(ROOT / "configs" / "experiment1.json"))
    parser.add_argument("--outdir", default=str(ROOT / "results"))
    parser.add_argument("--horizon", type=int, default=1000)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    code = cli.main(["certify", "--config", args.config,
                     "--out", str(outdir / "experiment1_certificate.json")])
    if code != cli.EXIT_OK:
        print(f"certification exited with code {code}", file=sys.stderr)
        return code
    print(f"certificate written to {outdir / 'experiment1_certificate.json'}")

    code = cli.main(["simulate", "--config", args.config,
                     "--out", str(outdir / "experiment1_envelope.csv"),
                     "--report", str(outdir / "experiment1_simulation.json"),
                     "--horizon", str(args.horizon),
                     "--trials", str(args.trials),
                     "--seed", str(args.seed)])
    if code == cli.EXIT_OK:
        print(f"simulation written to {outdir / 'experiment1_simulation.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())
