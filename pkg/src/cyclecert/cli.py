"""Command-line driver: certification, simulation, cycle listing, epsilon
bound curves, rearrangement checks, and random family generation.

Exit codes: 0 success, 1 error, 2 certificate not found.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import certify as _certify
from . import config as _config
from . import graph as _graph
from . import signal_sim as _sim
from .rearrange import evaluate_word, format_word, parse_word, rearrange, recombined
from .linalg import (
    InvalidInputError,
    SearchExhaustedError,
    SwitchedFamily,
    make_family,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_FOUND = 2


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cyclecert-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_json(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _emit_csv(header: list, rows: list, out: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(out, buf.getvalue())


def _certificate_dict(cert: _certify.Certificate) -> dict:
    return {
        "p": cert.p,
        "m": cert.m,
        "rho": cert.rho,
        "gamma": cert.gamma,
        "eps": cert.eps,
        "norm_bound": cert.norm_bound,
        "n_subsystems": cert.n_subsystems,
        "lhs": cert.lhs,
        "valid": cert.valid,
    }


def _cycle_set_dict(cs: _graph.CycleSet) -> dict:
    return {
        "anchor": cs.anchor,
        "start": cs.start,
        "cycles": [list(c) for c in cs.cycles],
    }


def _analyze(cfg: _config.AnalysisConfig, args) -> tuple[SwitchedFamily,
                                                         _certify.Algorithm1Result,
                                                         list]:
    family = _config.to_family(cfg, strict=args.strict)
    try:
        result = _certify.run_algorithm1(
            family,
            gamma=args.gamma if args.gamma is not None else cfg.gamma,
            theta=args.theta if args.theta is not None else cfg.theta,
            rho=args.rho if args.rho is not None else cfg.rho,
            m_max=args.m_max if args.m_max is not None else cfg.m_max,
        )
    except _certify.NoStableSubsystemError:
        result = _certify.Algorithm1Result(
            certificate=None, cycle_set=None,
            reason="no stable subsystem", warnings=())
    warnings = list(result.warnings)
    declared = cfg.declared_subsystem_count
    if declared is not None and declared != family.n:
        msg = (f"config declares {declared} subsystems but provides "
               f"{family.n} matrices; certification uses N={family.n}")
        if result.certificate is not None:
            cert = result.certificate
            alt = _certify.theorem_lhs(rho=cert.rho, gamma=cert.gamma,
                                       m=cert.m, n=declared,
                                       norm_bound=cert.norm_bound,
                                       eps=cert.eps)
            msg += f"; with N={declared} the certificate lhs would be {alt:.6g}"
        warnings.append(msg)
    return family, result, warnings


def cmd_certify(args) -> int:
    cfg = _config.load_config(args.config)
    family, result, warnings = _analyze(cfg, args)
    report = {
        "status": "certified" if result.found else "not-found",
        "certificate": (_certificate_dict(result.certificate)
                        if result.certificate else None),
        "cycle_set": (_cycle_set_dict(result.cycle_set)
                      if result.cycle_set else None),
        "reason": result.reason,
        "warnings": warnings,
        "n_subsystems": family.n,
        "strict": args.strict,
    }
    _emit_json(report, args.out)
    return EXIT_OK if result.found else EXIT_NOT_FOUND


def cmd_simulate(args) -> int:
    cfg = _config.load_config(args.config)
    family, result, warnings = _analyze(cfg, args)
    if not result.found:
        _emit_json({"status": "not-found", "reason": result.reason,
                    "warnings": warnings}, args.report)
        return EXIT_NOT_FOUND
    cert, cycle_set = result.certificate, result.cycle_set
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    trials = args.trials if args.trials is not None else cfg.trials
    seed = args.seed if args.seed is not None else cfg.seed
    policy = args.policy if args.policy is not None else cfg.policy
    ges = _sim.verify_ges(family, cert, cycle_set, horizon=horizon,
                          trials=trials, seed=seed, policy=policy)

    # norm envelope over trials, one row per step, for decay plots
    rng = np.random.default_rng(seed)
    x = rng.uniform(-10.0, 10.0, size=(trials, family.d))
    seq = _sim.build_signal(cycle_set, horizon, policy=policy, seed=seed)
    envelope = [float(np.max(np.linalg.norm(x, axis=1)))]
    for idx in seq:
        x = x @ family.matrix(idx).T
        envelope.append(float(np.max(np.linalg.norm(x, axis=1))))
    _emit_csv(["t", "norm_x"],
              [[t, repr(v)] for t, v in enumerate(envelope)], args.out)

    report = {
        "status": "certified",
        "certificate": _certificate_dict(cert),
        "cycle_set": _cycle_set_dict(cycle_set),
        "ges": {
            "c_used": ges.c_used,
            "gamma": ges.gamma,
            "horizon": ges.horizon,
            "trials": ges.trials,
            "policy": ges.policy,
            "seed": ges.seed,
            "max_violation_margin": ges.max_violation_margin,
            "passed": ges.passed,
            "max_final_over_initial": (envelope[-1] / envelope[0]
                                       if envelope[0] else 0.0),
        },
        "warnings": warnings,
    }
    _emit_json(report, args.report)
    return EXIT_OK


def cmd_cycles(args) -> int:
    cfg = _config.load_config(args.config)
    family = _config.to_family(cfg, strict=args.strict)
    digraph = _graph.build_digraph(family)
    if args.vertex is not None:
        vertices = [args.vertex]
    else:
        vertices = sorted(family.stable)
    report = {"vertices": {}}
    for p in vertices:
        cycles = _graph.enumerate_cycles_through(digraph, p)
        cs = _graph.group_concatenable(cycles, p)
        report["vertices"][str(p)] = {
            "cycles": [list(c) for c in cycles],
            "concatenable": _cycle_set_dict(cs) if cs else None,
        }
    _emit_json(report, args.out)
    return EXIT_OK


def _parse_int_values(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if ".." in tok:
            lo, hi = tok.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    return out


def _parse_float_values(text: str) -> list:
    return [float(tok) for tok in text.split(",")]


def cmd_epsilon_curves(args) -> int:
    ns = _parse_int_values(args.n_values)
    ms = _parse_int_values(args.m_values)
    big_ms = _parse_float_values(args.norm_bound_values)
    rhos = _parse_float_values(args.rho_values)
    gamma = args.gamma if args.gamma is not None else 0.0001
    rows = []
    for n in ns:
        for m in ms:
            for big_m in big_ms:
                for rho in rhos:
                    try:
                        bound = _certify.epsilon_bound(n, m, big_m, rho, gamma)
                        rows.append([n, m, repr(big_m), repr(rho), repr(gamma),
                                     repr(bound), "ok"])
                    except (_certify.InfeasibleParameterError, InvalidInputError):
                        rows.append([n, m, repr(big_m), repr(rho), repr(gamma),
                                     "", "infeasible"])
    _emit_csv(["N", "m", "M", "rho", "gamma", "epsilon_bound", "status"],
              rows, args.out)
    return EXIT_OK


def _random_matrices(indices, stable, d, rng, delta):
    if delta is not None:
        # diagonal base commutes exactly (so delta=0 gives zero commutators);
        # perturbed by a unit-Frobenius direction scaled to delta
        mats = {}
        for i in indices:
            diag = rng.uniform(0.3, 0.9, size=d)
            if i not in stable:
                diag[int(rng.integers(d))] = rng.uniform(1.05, 1.5)
            noise = rng.standard_normal((d, d))
            noise /= max(np.linalg.norm(noise), 1e-300)
            mats[i] = np.diag(diag) + delta * noise
        return mats
    mats = {}
    for i in indices:
        r = rng.standard_normal((d, d))
        radius = max(abs(np.linalg.eigvals(r)))
        if radius < 1e-8:
            radius = np.linalg.norm(r, 2)
        target = rng.uniform(0.4, 0.9) if i in stable else rng.uniform(1.1, 1.6)
        mats[i] = r * (target / radius)
    return mats


def generate_random_family_config(n: int, d: int, seed: int = 0,
                                  stable_frac: float = 0.5,
                                  edge_density: float = 0.5,
                                  delta: float | None = None
                                  ) -> _config.AnalysisConfig:
    """Seed-deterministic random family config.

    Stable matrices are spectrally scaled below radius 1, unstable ones above;
    with delta set, all matrices are a perturbation of a commuting base, so
    commutator norms scale linearly with delta.
    """
    if n < 1 or d < 1:
        raise InvalidInputError("n and d must be positive")
    rng = np.random.default_rng(seed)
    intended_stable = set(range(1, max(1, round(stable_frac * n)) + 1))
    indices = range(1, n + 1)
    mats = _random_matrices(indices, intended_stable, d, rng, delta)
    edges = [[i, j] for i in indices for j in indices
             if rng.random() < edge_density]
    matrices = [mats[i] for i in indices]
    family = make_family(matrices, [tuple(e) for e in edges])
    return _config.parse_config({
        "d": d,
        "subsystems": [{"id": i,
                        "matrix": [[float(v) for v in row] for row in mats[i]]}
                       for i in indices],
        "stable": sorted(family.stable),
        "unstable": sorted(family.unstable),
        "edges": edges,
        "seed": seed,
    })


def cmd_random_family(args) -> int:
    cfg = generate_random_family_config(
        args.n, args.dim, seed=args.seed if args.seed is not None else 0,
        stable_frac=args.stable_frac, edge_density=args.edge_density,
        delta=args.delta)
    _emit_json(_config.config_to_dict(cfg), args.out)
    return EXIT_OK


def cmd_rearrange_check(args) -> int:
    word = parse_word(args.word)
    max_index = max(s.i for s in word)
    if args.config:
        cfg = _config.load_config(args.config)
        family = _config.to_family(cfg, strict=args.strict)
        if family.n < max_index:
            raise InvalidInputError(
                f"word uses index {max_index} but family has {family.n} subsystems")
    else:
        rng = np.random.default_rng(args.seed if args.seed is not None else 0)
        mats = [rng.uniform(-1.0, 1.0, size=(args.dim, args.dim))
                for _ in range(max_index)]
        family = make_family(mats, edges=[])
    l1, l2 = rearrange(word, args.p, args.m)
    bound = (family.n - 1) * args.m * (args.m + 1) // 2
    original = evaluate_word(word, family)
    rebuilt = evaluate_word(recombined(l1, l2, args.p, args.m), family)
    residual = float(np.linalg.norm(rebuilt - original)
                     / max(np.linalg.norm(original), 1e-300))
    report = {
        "word": format_word(word),
        "p": args.p,
        "m": args.m,
        "l1": format_word(l1),
        "term_count": len(l2.terms),
        "term_bound": bound,
        "within_bound": len(l2.terms) <= bound,
        "residual_rel": residual,
    }
    _emit_json(report, args.out)
    return EXIT_OK


def _add_cert_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--strict", action="store_true",
                   help="reject inconclusive Schur classifications")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclecert",
        description="Stabilizing-cycle certificates for switched linear systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="run the anchor-detection algorithm")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    _add_cert_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="certify, then check decay on random trials")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="simulation.csv",
                   help="norm-envelope CSV path")
    p.add_argument("--report", default=None, help="report JSON path (default stdout)")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--policy", choices=_sim.POLICIES, default=None)
    _add_cert_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cycles", help="list cycles through stable vertices")
    p.add_argument("--config", required=True)
    p.add_argument("--vertex", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("epsilon-curves",
                       help="tabulate commutator-bound feasibility limits")
    p.add_argument("--n-values", default="2..10")
    p.add_argument("--m-values", default="1..5")
    p.add_argument("--norm-bound-values", default="2", dest="norm_bound_values")
    p.add_argument("--rho-values", default="0.9")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_epsilon_curves)

    p = sub.add_parser("rearrange-check",
                       help="verify the word rearrangement identity numerically")
    p.add_argument("--word", required=True,
                   help="index list, leftmost factor first, e.g. '2 4 3 1 4 3 2 1'")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rearrange_check)

    p = sub.add_parser("random-family", help="generate a seeded random config")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--stable-frac", type=float, default=0.5)
    p.add_argument("--edge-density", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", default=None, help="config JSON path (default stdout)")
    p.set_defaults(func=cmd_random_family)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (_config.ConfigError, InvalidInputError, SearchExhaustedError,
            _certify.InfeasibleGammaError, _certify.InfeasibleParameterError,
            _certify.NoStableSubsystemError,
            _sim.TrajectoryOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
