"""JSON analysis configs: schema validation, round-trippable serialization,
and conversion to a validated switched family."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .linalg import DEFAULT_M_MAX, SwitchedFamily, make_family

_ALLOWED_KEYS = {
    "d", "subsystems", "stable", "unstable", "edges",
    "gamma", "theta", "rho", "m_max", "horizon", "trials", "seed", "policy",
    "declared_subsystem_count", "notes",
}
_SUBSYSTEM_KEYS = {"id", "matrix"}


class ConfigError(ValueError):
    """Malformed analysis config; the message carries field context."""


@dataclass(frozen=True)
class AnalysisConfig:
    d: int
    subsystems: tuple  # ((id, ((row...), ...)), ...) sorted by id
    edges: tuple  # ((i, j), ...) sorted
    stable: tuple | None = None
    unstable: tuple | None = None
    gamma: float | None = None
    theta: float = 0.5
    rho: float | None = None
    m_max: int = DEFAULT_M_MAX
    horizon: int = 1000
    trials: int = 1000
    seed: int = 0
    policy: str = "roundrobin"
    declared_subsystem_count: int | None = None
    notes: str | None = None

    @property
    def n(self) -> int:
        return len(self.subsystems)


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def parse_config(obj: dict) -> AnalysisConfig:
    """Validate a decoded JSON object against the config schema."""
    _require(isinstance(obj, dict), "config must be a JSON object")
    unknown = set(obj) - _ALLOWED_KEYS
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    for key in ("d", "subsystems", "edges"):
        _require(key in obj, f"missing required key {key!r}")
    d = obj["d"]
    _require(isinstance(d, int) and d >= 1, "d: must be a positive integer")

    subsystems = []
    _require(isinstance(obj["subsystems"], list) and obj["subsystems"],
             "subsystems: must be a nonempty array")
    for k, sub in enumerate(obj["subsystems"]):
        ctx = f"subsystems[{k}]"
        _require(isinstance(sub, dict), f"{ctx}: must be an object")
        _require(set(sub) == _SUBSYSTEM_KEYS,
                 f"{ctx}: needs exactly keys {sorted(_SUBSYSTEM_KEYS)}")
        sid = sub["id"]
        _require(isinstance(sid, int) and sid >= 1,
                 f"{ctx}.id: must be a positive integer")
        rows = sub["matrix"]
        _require(isinstance(rows, list) and len(rows) == d,
                 f"{ctx}.matrix: expected {d} rows")
        matrix = []
        for r, row in enumerate(rows):
            _require(isinstance(row, list) and len(row) == d,
                     f"{ctx}.matrix row {r}: expected {d} entries")
            _require(all(isinstance(v, (int, float)) and not isinstance(v, bool)
                         for v in row),
                     f"{ctx}.matrix row {r}: entries must be numbers")
            matrix.append(tuple(float(v) for v in row))
        subsystems.append((sid, tuple(matrix)))
    subsystems.sort()
    ids = [sid for sid, _ in subsystems]
    n = len(ids)
    _require(ids == list(range(1, n + 1)),
             f"subsystems: ids must be exactly 1..{n}, got {ids}")

    edges = []
    _require(isinstance(obj["edges"], list), "edges: must be an array")
    for k, e in enumerate(obj["edges"]):
        _require(isinstance(e, list) and len(e) == 2
                 and all(isinstance(v, int) for v in e),
                 f"edges[{k}]: must be a pair of integers")
        _require(1 <= e[0] <= n and 1 <= e[1] <= n,
                 f"edges[{k}]: endpoints must lie in 1..{n}")
        edges.append((e[0], e[1]))
    edges = tuple(sorted(set(edges)))

    def _index_set(key):
        if key not in obj:
            return None
        val = obj[key]
        _require(isinstance(val, list) and all(isinstance(v, int) for v in val),
                 f"{key}: must be an array of integers")
        _require(all(1 <= v <= n for v in val),
                 f"{key}: indices must lie in 1..{n}")
        return tuple(sorted(set(val)))

    stable = _index_set("stable")
    unstable = _index_set("unstable")
    if stable is not None and unstable is not None:
        _require(not set(stable) & set(unstable),
                 "stable/unstable: sets must be disjoint")
        _require(set(stable) | set(unstable) == set(range(1, n + 1)),
                 "stable/unstable: sets must cover 1..N")

    def _number(key, default=None, positive=True):
        if key not in obj:
            return default
        val = obj[key]
        _require(isinstance(val, (int, float)) and not isinstance(val, bool),
                 f"{key}: must be a number")
        _require(not positive or val > 0, f"{key}: must be positive")
        return float(val)

    def _integer(key, default, minimum=1):
        if key not in obj:
            return default
        val = obj[key]
        _require(isinstance(val, int) and not isinstance(val, bool)
                 and val >= minimum, f"{key}: must be an integer >= {minimum}")
        return val

    policy = obj.get("policy", "roundrobin")
    _require(policy in ("roundrobin", "random"),
             "policy: must be 'roundrobin' or 'random'")
    notes = obj.get("notes")
    _require(notes is None or isinstance(notes, str), "notes: must be a string")

    return AnalysisConfig(
        d=d,
        subsystems=tuple(subsystems),
        edges=edges,
        stable=stable,
        unstable=unstable,
        gamma=_number("gamma"),
        theta=_number("theta", 0.5) or 0.5,
        rho=_number("rho"),
        m_max=_integer("m_max", DEFAULT_M_MAX),
        horizon=_integer("horizon", 1000),
        trials=_integer("trials", 1000),
        seed=_integer("seed", 0, minimum=0),
        policy=policy,
        declared_subsystem_count=_integer("declared_subsystem_count", None),
        notes=notes,
    )


def config_to_dict(cfg: AnalysisConfig) -> dict:
    """JSON-ready dict; optional fields that are unset are omitted."""
    out = {
        "d": cfg.d,
        "subsystems": [
            {"id": sid, "matrix": [list(row) for row in matrix]}
            for sid, matrix in cfg.subsystems
        ],
        "edges": [list(e) for e in cfg.edges],
        "theta": cfg.theta,
        "m_max": cfg.m_max,
        "horizon": cfg.horizon,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "policy": cfg.policy,
    }
    if cfg.stable is not None:
        out["stable"] = list(cfg.stable)
    if cfg.unstable is not None:
        out["unstable"] = list(cfg.unstable)
    for key in ("gamma", "rho", "declared_subsystem_count", "notes"):
        val = getattr(cfg, key)
        if val is not None:
            out[key] = val
    return out


def load_config(path) -> AnalysisConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_config(obj)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def save_config(cfg: AnalysisConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def to_family(cfg: AnalysisConfig, strict: bool = False) -> SwitchedFamily:
    """Validated switched family; the partition is inferred when undeclared."""
    matrices = [matrix for _, matrix in cfg.subsystems]
    stable = set(cfg.stable) if cfg.stable is not None else None
    unstable = set(cfg.unstable) if cfg.unstable is not None else None
    return make_family(matrices, cfg.edges, stable=stable, unstable=unstable,
                       strict=strict)
