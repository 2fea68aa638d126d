"""Experiment orchestration: network lookup, weight construction, the
convergence-factor table and Monte-Carlo team-error simulations."""

from __future__ import annotations

import difflib
import json
import logging
import re
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .bandit import BANDIT_STREAM, agent_rngs, rng_stream, sample_bandit
from .coopucb2 import AlgoParams, run_episode
from .graph import Graph, gen_clustered, gen_complete, gen_star, load_graph
from .metrics import ErrorCurve, aggregate, settling_time
from .optimizer import SolveOptions, solve_fdla, solve_fmmc
from .weights import (
    WeightMatrix,
    best_constant_weights,
    kappa_weights,
    local_degree_weights,
    max_degree_weights,
    save_weights,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "MethodSpec",
    "load_config",
    "resolve_network",
    "resolve_method",
    "build_weights",
    "convergence_table",
    "write_table",
    "simulate",
    "SimulationResult",
    "SHIPPED_NETWORKS",
]

log = logging.getLogger(__name__)

METHOD_ALIASES = {
    "kappa": "kappa",
    "constant": "best_constant",
    "const": "best_constant",
    "constant_edge": "best_constant",
    "best_constant": "best_constant",
    "maxdeg": "max_degree",
    "max_degree": "max_degree",
    "localdeg": "local_degree",
    "local_degree": "local_degree",
    "fmmc": "fmmc",
    "fdla": "fdla",
}

# edge-list files shipped with the package
SHIPPED_NETWORKS = ("eight_agent", "cluster2", "cluster3", "cluster4")

TABLE_METHODS = ("kappa", "best_constant", "max_degree", "local_degree", "fmmc", "fdla")


class ConfigError(ValueError):
    """Invalid experiment configuration or command-line input."""


def resolve_method(name) -> str:
    try:
        return METHOD_ALIASES[str(name).lower()]
    except KeyError:
        raise ConfigError(f"unknown weight method {name!r}; choose from {sorted(METHOD_ALIASES)}") from None


def resolve_network(name_or_path) -> Graph:
    """Graph for a topology name (``complete5``, ``star5``, ``cluster3``,
    ``cluster3x6``, ``eight_agent``) or an edge-list file path."""
    name = str(name_or_path)
    if (m := re.fullmatch(r"complete(\d+)", name)) is not None:
        return gen_complete(int(m.group(1)))
    if (m := re.fullmatch(r"star(\d+)", name)) is not None:
        return gen_star(int(m.group(1)))
    if (m := re.fullmatch(r"clusters?(\d+)x(\d+)(?:_(complete|star))?", name)) is not None:
        return gen_clustered(int(m.group(1)), int(m.group(2)), m.group(3) or "complete")
    if name in SHIPPED_NETWORKS:
        with resources.as_file(resources.files("relweights") / "data" / f"{name}.txt") as path:
            return load_graph(path)
    path = Path(name)
    if path.exists():
        return load_graph(path)
    raise ConfigError(f"unknown network {name!r} (not a known topology name or an existing file)")


@dataclass(frozen=True)
class MethodSpec:
    method: str
    kappa: float = 0.02

    @property
    def label(self) -> str:
        if self.method == "kappa":
            return f"kappa={self.kappa:g}"
        return self.method


def build_weights(g: Graph, spec: MethodSpec | str, solve_options: SolveOptions | None = None):
    """Weight matrix for one method. Returns ``(WeightMatrix, SolveResult or None)``."""
    if isinstance(spec, str):
        spec = MethodSpec(resolve_method(spec))
    if spec.method == "kappa":
        return kappa_weights(g, spec.kappa), None
    if spec.method == "best_constant":
        return best_constant_weights(g), None
    if spec.method == "max_degree":
        return max_degree_weights(g), None
    if spec.method == "local_degree":
        return local_degree_weights(g), None
    solver = solve_fmmc if spec.method == "fmmc" else solve_fdla
    result = solver(g, solve_options)
    return result.weights, result


def _fmt(x):
    if x is None:
        return "nonconvergent"
    return f"{x:.17g}"


def convergence_table(networks, methods=TABLE_METHODS, solve_options=None):
    """``{method label: {network: (rho, tau)}}`` computed fresh for every cell."""
    specs = [m if isinstance(m, MethodSpec) else MethodSpec(resolve_method(m)) for m in methods]
    graphs = {str(n): (n if isinstance(n, Graph) else resolve_network(n)) for n in networks}
    table = {}
    for spec in specs:
        row = {}
        for name, g in graphs.items():
            w, _ = build_weights(g, spec, solve_options)
            row[name] = (w.rho, w.tau)
        table[spec.label] = row
    return table


def write_table(table, path):
    networks = list(next(iter(table.values())).keys()) if table else []
    header = ["method"] + [f"{n}_{q}" for n in networks for q in ("rho", "tau")]
    lines = [",".join(header)]
    for label, row in table.items():
        cells = [label]
        for n in networks:
            rho, tau = row[n]
            cells += [_fmt(rho), _fmt(tau)]
        lines.append(",".join(cells))
    _write_lines(path, lines)


def _write_lines(path, lines):
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ExperimentConfig:
    network: str
    methods: tuple[MethodSpec, ...]
    n_arms: int = 100
    sigma: float = 1.0
    horizon: int = 1000
    runs: int = 10000
    seed: int = 0
    sigma_g: float = 1.0
    gamma: float = 1.1
    eta: float = 2.0
    f: str = "sqrt_log"
    settle_fraction: float = 0.05
    settle_reference: str = "peak"
    out: str = "results"

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("methods: at least one weight method is required")
        if self.runs < 1:
            raise ConfigError("runs: must be >= 1")
        if self.n_arms < 2:
            raise ConfigError("n_arms: need at least two arms")
        if self.horizon <= self.n_arms:
            raise ConfigError(
                f"horizon: {self.horizon} must exceed n_arms={self.n_arms} "
                "(every agent first pulls every arm once)"
            )
        if self.sigma < 0:
            raise ConfigError("sigma: must be nonnegative")
        if not 0 < self.settle_fraction < 1:
            raise ConfigError("settle_fraction: must lie in (0, 1)")
        if self.settle_reference not in ("peak", "final"):
            raise ConfigError("settle_reference: must be 'peak' or 'final'")
        try:
            self.algo_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def algo_params(self) -> AlgoParams:
        return AlgoParams(self.sigma_g, self.gamma, self.eta, self.f)


_FIELD_TYPES = {
    "n_arms": int,
    "horizon": int,
    "runs": int,
    "seed": int,
    "sigma": float,
    "sigma_g": float,
    "gamma": float,
    "eta": float,
    "settle_fraction": float,
    "f": str,
    "settle_reference": str,
    "out": str,
    "network": str,
}


def _parse_method(item) -> MethodSpec:
    if isinstance(item, str):
        return MethodSpec(resolve_method(item))
    if isinstance(item, dict):
        item = dict(item)
        if "method" not in item:
            raise ConfigError("methods: each object needs a 'method' key")
        method = resolve_method(item.pop("method"))
        kappa = item.pop("kappa", 0.02)
        if item:
            raise ConfigError(f"methods: unexpected keys {sorted(item)} for {method}")
        if method != "kappa" and kappa != 0.02:
            raise ConfigError(f"methods: 'kappa' only applies to the kappa method, not {method}")
        if not isinstance(kappa, (int, float)) or isinstance(kappa, bool) or not 0 < kappa <= 1:
            raise ConfigError("methods: kappa must be a number in (0, 1]")
        return MethodSpec(method, float(kappa))
    raise ConfigError(f"methods: cannot interpret {item!r}")


def config_from_dict(raw: dict, **overrides) -> ExperimentConfig:
    """Validate a flat config mapping; unknown keys are rejected."""
    known = {f.name for f in fields(ExperimentConfig)}
    for key in raw:
        if key not in known:
            hint = difflib.get_close_matches(key, known, n=1)
            extra = f" (did you mean {hint[0]!r}?)" if hint else ""
            raise ConfigError(f"unknown config key {key!r}{extra}")
    data = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    for key in ("network", "methods"):
        if key not in data:
            raise ConfigError(f"{key}: required field missing")
    kwargs = {}
    for key, value in data.items():
        if key == "methods":
            if not isinstance(value, list):
                raise ConfigError("methods: expected a list")
            kwargs[key] = tuple(_parse_method(v) for v in value)
            continue
        want = _FIELD_TYPES[key]
        ok = isinstance(value, want) and not isinstance(value, bool)
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value, ok = float(value), True
        if not ok:
            raise ConfigError(f"{key}: expected {want.__name__}, got {type(value).__name__}")
        kwargs[key] = value
    return ExperimentConfig(**kwargs)


def load_config(path, **overrides) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return config_from_dict(raw, **overrides)


@dataclass
class SimulationResult:
    config: ExperimentConfig
    weights: dict[str, WeightMatrix]
    curves: dict
    settling: dict[str, int | None]
    final_regret: dict[str, float]
    files: list[Path] = field(default_factory=list)
    solver_warnings: list[str] = field(default_factory=list)


def _slug(label):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


def simulate(cfg: ExperimentConfig, solve_options=None, write=True) -> SimulationResult:
    """Run ``cfg.runs`` episodes per method and emit curve and summary CSVs.

    Run ``r`` plays the same bandit and the same per-agent reward streams
    under every method, so methods are compared on common random numbers.
    """
    g = resolve_network(cfg.network)
    g.require_connected()
    params = cfg.algo_params()
    weights, curves, final_regret, warnings = {}, {}, {}, []
    for spec in cfg.methods:
        w, result = build_weights(g, spec, solve_options)
        if result is not None and not result.converged:
            warnings.append(spec.label)
        weights[spec.label] = w
        errors = []
        regret_sum = 0.0
        for run in range(cfg.runs):
            bandit = sample_bandit(cfg.n_arms, rng_stream(cfg.seed, run, BANDIT_STREAM), cfg.sigma)
            logs = run_episode(g, w, bandit, params, cfg.horizon, agent_rngs(cfg.seed, run, g.m))
            errors.append(ErrorCurve(np.array([e.delta for e in logs]), run, spec.label, cfg.network))
            regret_sum += logs[-1].regret
        curves[spec.label] = aggregate(errors)
        final_regret[spec.label] = regret_sum / cfg.runs
        log.info("%s: %d runs done", spec.label, cfg.runs)
    settling = settling_time(curves, cfg.settle_fraction, cfg.settle_reference)
    res = SimulationResult(cfg, weights, curves, settling, final_regret, solver_warnings=warnings)
    if write:
        _write_simulation(res)
    return res


def _write_simulation(res: SimulationResult):
    cfg = res.config
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = cfg.n_arms + 1
    for label, curve in res.curves.items():
        path = out / f"curve_{_slug(label)}.csv"
        lines = ["t,mean_delta,stderr"]
        lines += [f"{t0 + i},{_fmt(m)},{_fmt(s)}" for i, (m, s) in enumerate(zip(curve.mean, curve.stderr))]
        _write_lines(path, lines)
        res.files.append(path)
        wpath = out / f"weights_{_slug(label)}.csv"
        save_weights(res.weights[label], wpath)
        res.files.append(wpath)
    path = out / "summary.csv"
    lines = ["method,network,rho,tau,settling_step,final_regret_mean"]
    for label, w in res.weights.items():
        s = res.settling[label]
        settle = "not_attained" if s is None else str(t0 + s)
        lines.append(
            f"{label},{cfg.network},{_fmt(w.rho)},{_fmt(w.tau)},{settle},{_fmt(res.final_regret[label])}"
        )
    _write_lines(path, lines)
    res.files.append(path)
    cfg_path = out / "config.json"
    dump = asdict(cfg)
    dump["methods"] = [asdict(m) for m in cfg.methods]
    cfg_path.write_text(json.dumps(dump, indent=2, sort_keys=True) + "\n")
    res.files.append(cfg_path)
