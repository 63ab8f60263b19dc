"""Seeded experiment pipelines behind the command line.

A config is a flat set of ``key=value`` pairs (from a file, flags, or
both; flags win).  Replicate k always draws from ``replicate_rng(seed, k)``,
so records do not depend on the worker count or on which other replicates
run.  Each run yields CSV records plus a JSON summary with the keys
``config``, ``estimates``, ``diagnostics`` and ``version``.
"""

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .graphs import GraphSpecError, parse_graph_spec
from .loop_erasure import length_sequence
from .rayleigh import (coupling_law, maximal_coupling, rayleigh_event_driven,
                       rayleigh_from_field, rayleigh_values_at, sample_poisson_field,
                       surrogate_lengths)
from .rng import replicate_rng
from .segments import CASE1, CASE2, ScheduleInfeasible, build_schedule, estimate_constants
from .stats import fdd_compare, modulus_w, path_from_series, time_index
from .walk import mixing_time, walk_steps

SUBCOMMANDS = ("lerw-run", "rayleigh-run", "surrogate-run", "constants", "mixing", "fdd",
               "couple-verify", "modulus")
SEEDLESS = {"mixing", "modulus", "couple-verify"}
# stream index reserved for constant estimation inside lerw-run / fdd
CONSTANTS_STREAM = 1 << 40
RAYLEIGH_STREAM = 1 << 41


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    subcommand: str
    seed: int | None = None
    graph: str | None = None
    case: int = 1
    replicates: int = 1
    horizon: float | None = None
    times: list | None = None
    eta: float = 0.05
    output: str | None = None
    summary: str | None = None
    workers: int = 1
    tmax: int | None = None
    m: int | None = None
    J: int | None = None
    mode: str = "event"
    y: float = 0.0
    theta: float | None = None
    T: float | None = None
    path: str | None = None
    slope: float = 1.0
    r: int | None = None
    s: int | None = None
    w: int | None = None
    tau: int | None = None
    a: float | None = None
    b: float | None = None
    cap_replicates: int = 200
    const_replicates: int = 200
    rayleigh_replicates: int | None = None
    source: str = "lerw"
    count_root: bool = True
    p: float | None = None
    q: float | None = None
    j: int | None = None
    delta: float | None = None
    skip: list = field(default_factory=list)

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None and v != []}


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key, raw):
    typ = _FIELD_TYPES[key]
    text = str(raw).strip()
    try:
        if key in ("times",):
            return [float(v) for v in text.split(",") if v.strip()]
        if key == "skip":
            return [int(v) for v in text.split(",") if v.strip()]
        if "bool" in str(typ):
            if text.lower() not in ("true", "false", "1", "0"):
                raise ValueError(text)
            return text.lower() in ("true", "1")
        if "int" in str(typ):
            return int(text)
        if "float" in str(typ):
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config(text: str | None = None, flags: dict | None = None) -> ExperimentConfig:
    """Merge ``key=value`` lines and flag values (flags win) into a config."""
    values = {}
    for lineno, line in enumerate((text or "").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ConfigError(f"line {lineno}: expected key=value")
        values[key.strip()] = val.strip()
    for key, val in (flags or {}).items():
        if val is not None:
            values[key.replace("-", "_")] = val
    unknown = set(values) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    if "subcommand" not in values:
        raise ConfigError("subcommand required")
    cfg = ExperimentConfig(**{k: _convert(k, v) for k, v in values.items()})
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig):
    if cfg.subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.seed is None and cfg.subcommand not in SEEDLESS:
        raise ConfigError("seed required")
    if cfg.replicates < 1:
        raise ConfigError("replicates must be >= 1")
    if cfg.times is not None and any(b <= a for a, b in zip(cfg.times, cfg.times[1:])):
        raise ConfigError("times must be ascending")
    if cfg.graph is not None:
        try:
            parse_graph_spec(cfg.graph)
        except GraphSpecError as exc:
            raise ConfigError(str(exc)) from None
    if cfg.case not in (CASE1, CASE2):
        raise ConfigError("case must be 1 or 2")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")


@dataclass
class RunResult:
    config: ExperimentConfig
    header: list
    records: list
    estimates: dict
    diagnostics: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    version: str = __version__

    def summary(self) -> dict:
        return {"config": self.config.to_dict(), "estimates": self.estimates,
                "diagnostics": self.diagnostics, "version": self.version}

    def csv_text(self) -> str:
        return format_csv(self.header, self.records)

    def json_text(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(type(obj))


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def format_csv(header, records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(v) for v in rec])
    return buf.getvalue()


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _replicate_ids(cfg):
    skip = set(cfg.skip)
    return [k for k in range(cfg.replicates) if k not in skip]


# --- pipelines ----------------------------------------------------------------


def resolve_constants(cfg: ExperimentConfig, g):
    """Use a/b from the config, else estimate them (reserved rng stream)."""
    if cfg.a is not None and cfg.b is not None:
        return cfg.a, cfg.b, {}
    consts = run_constants_estimate(cfg, g, cfg.const_replicates,
                                    replicate_rng(cfg.seed, CONSTANTS_STREAM))
    return consts.a, consts.b, consts.as_dict()


def run_constants_estimate(cfg, g, replicates, rng):
    tau = cfg.tau
    if cfg.case == CASE1 and tau is None and (cfg.r is None or cfg.s is None):
        rep = mixing_time(g)
        if not rep.reached:
            raise ScheduleInfeasible("mixing time not reached")
        tau = rep.tau
    sched = build_schedule(cfg.case, g, tau=tau, eta=cfg.eta, horizon=0, r=cfg.r, s=cfg.s, w=cfg.w)
    return estimate_constants(g, cfg.case, sched, replicates, rng, cfg.cap_replicates)


def _lerw_task(args):
    graph_spec, seed, k, T, idx = args
    g = parse_graph_spec(graph_spec)
    Y = length_sequence(walk_steps(g, 0, T, replicate_rng(seed, k)))
    return Y[idx]


def lerw_samples(cfg, g, a, times, ids):
    """Y at g(t) for each replicate id; rows follow ``ids``."""
    n = g.n if g.kind == "torus" else None
    idx = time_index(times, cfg.case, a, g.vertex_count, n)
    T = int(idx.max())
    tasks = [(g.spec(), cfg.seed, k, T, idx) for k in ids]
    return np.array(_map(_lerw_task, tasks, cfg.workers)).reshape(len(ids), len(times))


def _z_factor(cfg, g, b):
    if cfg.case == CASE1:
        return b / math.sqrt(g.vertex_count)
    return b / (g.n**2 * math.log(g.n) ** (1 / 6))


def _times(cfg):
    if cfg.times:
        return list(cfg.times)
    if cfg.horizon is not None:
        return [cfg.horizon]
    raise ConfigError("times or horizon required")


def _need(cfg, *keys):
    missing = [k for k in keys if getattr(cfg, k) is None]
    if missing:
        raise ConfigError(f"{cfg.subcommand} requires {', '.join(missing)}")


def run_lerw(cfg):
    _need(cfg, "graph")
    g = parse_graph_spec(cfg.graph)
    times = _times(cfg)
    a, b, est = resolve_constants(cfg, g)
    ids = _replicate_ids(cfg)
    Y = lerw_samples(cfg, g, a, times, ids)
    zf = _z_factor(cfg, g, b)
    records = [(k, t, int(Y[r, i]), zf * int(Y[r, i]))
               for r, k in enumerate(ids) for i, t in enumerate(times)]
    Z = Y * zf
    estimates = {"a": a, "b": b, **{f"constants_{k}": v for k, v in est.items()},
                 "mean_Z": {str(t): float(Z[:, i].mean()) for i, t in enumerate(times)}}
    return ["replicate", "t", "Y", "Z"], records, estimates, {}


def run_rayleigh(cfg):
    _need(cfg, "horizon")
    records = []
    finals = []
    for k in _replicate_ids(cfg):
        rng = replicate_rng(cfg.seed, k)
        if cfg.mode == "event":
            path = rayleigh_event_driven(cfg.y, cfg.horizon, rng)
        elif cfg.mode == "field":
            path = rayleigh_from_field(
                sample_poisson_field(cfg.horizon, cfg.y + cfg.horizon, rng), cfg.y, cfg.horizon)
        else:
            raise ConfigError("mode must be 'event' or 'field'")
        records.append((k, 0.0, cfg.y))
        records.extend((k, t, v) for t, v in path.breakpoints)
        finals.append(path(cfg.horizon))
    return (["replicate", "time", "value"], records,
            {"mean_final": float(np.mean(finals))}, {"mode": cfg.mode})


def _surrogate_m(cfg):
    if cfg.m is not None:
        return cfg.m
    if cfg.graph is not None:
        g = parse_graph_spec(cfg.graph)
        if g.kind == "complete":
            return g.m
    raise ConfigError("surrogate-run requires m (or a complete graph spec)")


def run_surrogate(cfg):
    m = _surrogate_m(cfg)
    if cfg.J is not None:
        J = cfg.J
    elif cfg.horizon is not None:
        J = int(math.floor(cfg.horizon * math.sqrt(m)))
    else:
        raise ConfigError("surrogate-run requires J or horizon")
    records, finals = [], []
    for k in _replicate_ids(cfg):
        L = surrogate_lengths(m, J, 1, replicate_rng(cfg.seed, k))[0]
        records.extend((k, j, int(L[j])) for j in range(J + 1))
        finals.append(L[-1])
    d = m**-0.5
    return (["replicate", "j", "L"], records,
            {"m": m, "J": J, "mean_L_J": float(np.mean(finals)),
             "mean_rescaled_L_J": float(d * np.mean(finals))}, {})


def run_constants(cfg):
    _need(cfg, "graph")
    g = parse_graph_spec(cfg.graph)
    consts = run_constants_estimate(cfg, g, cfg.replicates, replicate_rng(cfg.seed, 0))
    est = consts.as_dict()
    diag = {"delta": cfg.delta} if cfg.delta is not None else {}
    return list(est), [tuple(est.values())], est, diag


def run_mixing(cfg):
    _need(cfg, "graph", "tmax")
    g = parse_graph_spec(cfg.graph)
    rep = mixing_time(g, cfg.tmax)
    est = {"tau": rep.tau, "graph": g.spec(), "tmax": cfg.tmax}
    return ["t", "separation_deviation"], rep.separation_curve, est, {"reached": rep.reached}


def run_fdd(cfg):
    times = _times(cfg)
    n_ray = cfg.rayleigh_replicates or cfg.replicates
    ids = _replicate_ids(cfg)
    if cfg.source == "lerw":
        _need(cfg, "graph")
        g = parse_graph_spec(cfg.graph)
        a, b, _ = resolve_constants(cfg, g)
        sample = lerw_samples(cfg, g, a, times, ids) * _z_factor(cfg, g, b)
    elif cfg.source == "surrogate":
        m = _surrogate_m(cfg)
        d = m**-0.5
        steps = [int(math.floor(t / d)) for t in times]
        # count_root=False drops the permanently retained index 0
        offset = 0 if cfg.count_root else 1
        sample = np.array([d * (surrogate_lengths(m, steps[-1], 1, replicate_rng(cfg.seed, k))[0][steps]
                                - offset) for k in ids])
    else:
        raise ConfigError("source must be 'lerw' or 'surrogate'")
    ray = rayleigh_values_at(times, n_ray, replicate_rng(cfg.seed, RAYLEIGH_STREAM))
    report = fdd_compare(sample, ray, times, seeds={"base": cfg.seed})
    return (["time", "ks", "n_lerw", "n_rayleigh"], report.rows(),
            {"ks": dict(zip(map(str, times), report.ks))}, {"source": cfg.source})


def run_couple(cfg):
    _need(cfg, "j", "p", "q")
    try:
        law = coupling_law(cfg.p, cfg.q, cfg.j)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    from .rayleigh import v_law, w_law
    marg_err = max(np.abs(law.v_marginal() - v_law(cfg.p, cfg.j)).max(),
                   np.abs(law.w_marginal() - w_law(cfg.q, cfg.j)).max())
    records = [(a, c, float(law.joint[a, c])) for a in range(law.joint.shape[0])
               for c in range(law.joint.shape[1]) if law.joint[a, c] > 0]
    est = {"match_probability": law.match_probability, "bound": law.bound,
           "match_ge_bound": bool(law.match_probability >= law.bound - 1e-12)}
    diag = {"max_marginal_error": float(marg_err)}
    if cfg.seed is not None and cfg.replicates > 1:
        V, W, _ = maximal_coupling(cfg.p, cfg.q, cfg.j, replicate_rng(cfg.seed, 0), cfg.replicates)
        diag["empirical_match"] = float(np.mean(np.all(V == W, axis=1)))
    return ["v_outcome", "w_pattern", "probability"], records, est, diag


def read_path_csv(path_file: str, slope: float):
    with open(path_file, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    t = [float(r[0]) for r in rows]
    v = [float(r[1]) for r in rows]
    return path_from_series(t, v, slope)


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def run_modulus(cfg):
    _need(cfg, "path", "theta", "T")
    try:
        path = read_path_csv(cfg.path, cfg.slope)
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigError(f"cannot read path: {exc}") from None
    w = modulus_w(path, cfg.theta, cfg.T)
    return ["theta", "T", "w"], [(cfg.theta, cfg.T, w)], {"w": w}, {}


PIPELINES = {
    "lerw-run": run_lerw,
    "rayleigh-run": run_rayleigh,
    "surrogate-run": run_surrogate,
    "constants": run_constants,
    "mixing": run_mixing,
    "fdd": run_fdd,
    "couple-verify": run_couple,
    "modulus": run_modulus,
}


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> RunResult:
    validate(cfg)
    start = time.perf_counter()
    header, records, estimates, diagnostics = PIPELINES[cfg.subcommand](cfg)
    result = RunResult(cfg, header, records, estimates, diagnostics,
                       time.perf_counter() - start)
    if write:
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(result.csv_text())
        if cfg.summary:
            with open(cfg.summary, "w", encoding="utf-8") as fh:
                fh.write(result.json_text())
    return result
