"""Experiment pipelines behind the command line: each returns an ExperimentResult
whose rows follow the fixed schema

    sweep_param, sweep_value, statistic, value, stddev, n_samples
"""

import csv
import io
import json
import math
import subprocess
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import eta_asym, limit_constant
from .channel_mc import run_realizations
from .config import Experiment, PARAM_KEYS, config_echo
from .design_opt import optimal_density, optimal_sir, rate_density
from .errors import ConfigError, ParameterError
from .geometry import BSModel, hex_grid_cell_edge
from .hex_model import MAX_HEX_K, cell_edge_eta
from .pk_dist import PkDistribution, eta_cdf_grid, outage_pk

__all__ = [
    "Row",
    "ExperimentResult",
    "CSV_COLUMNS",
    "run_experiment",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "run_pk_cdf_table",
    "run_optimize_density",
    "run_custom",
    "CUSTOM_STATISTICS",
    "write_result",
    "result_to_csv",
    "result_to_json",
]

CSV_COLUMNS = ("sweep_param", "sweep_value", "statistic", "value", "stddev", "n_samples")


@dataclass(frozen=True)
class Row:
    sweep_param: str
    sweep_value: object
    statistic: str
    value: float
    stddev: float
    n_samples: int

    def cells(self):
        return [
            self.sweep_param,
            _fmt_cell(self.sweep_value),
            self.statistic,
            _fmt_cell(self.value),
            _fmt_cell(self.stddev),
            str(self.n_samples),
        ]


@dataclass
class ExperimentResult:
    rows: list
    provenance: dict = field(default_factory=dict)


def _fmt_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def version_string():
    """Package version, plus ``git describe`` output when run from a checkout."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _seed_for(master_seed, *keys):
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _stat_row(param, value, name, samples):
    samples = np.asarray(samples, dtype=float)
    return Row(param, value, name, float(np.mean(samples)), float(np.std(samples)), len(samples))


def _exact_row(param, value, name, x, n=1):
    return Row(param, value, name, float(x), 0.0, n)


def _ecdf(samples, grid):
    s = np.sort(np.asarray(samples, dtype=float))
    return np.searchsorted(s, grid, side="right") / len(s)


def _params_with(params, **changes):
    try:
        return replace(params, **changes)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def _parse_tuple(text):
    try:
        k, l, lb = text.lower().split("x")
        return int(k), int(l), float(lb)
    except ValueError:
        raise ConfigError(f"tuple {text!r} is not of the form KxLxlambda_b") from None


def _tuple_label(K, L, lam_b):
    return f"K={K};L={L};lambda_b={lam_b!r}"


def run_fig2(config, jobs=1):
    """Normalized SIR SIR / (L^(alpha/2-1) P_K) against L for several K."""
    if config.experiment is not Experiment.FIG2:
        raise ConfigError("run_fig2 needs a fig2_normalized_sir config")
    if config.sweep_param != "L":
        raise ConfigError("fig2 sweeps L")
    p = config.params
    ks = config.extra_list("K_list", int) or [p.K]
    ref = limit_constant(p.alpha, p.lam)
    rows = []
    for a, L in enumerate(config.sweep_values):
        for b, K in enumerate(ks):
            params = _params_with(p, K=K, L=int(L))
            samples = run_realizations(
                params, config.n_realizations, _seed_for(config.master_seed, a, b), jobs=jobs
            )
            norm = [s.sir_mmse / (L ** (0.5 * p.alpha - 1.0) * s.p_k) for s in samples]
            rows.append(_stat_row("L", L, f"normalized_sir[K={K}]", norm))
            rows.append(
                _exact_row("L", L, f"normalized_sir_asymptote[K={K}]", K ** (0.5 * p.alpha - 1.0) * ref)
            )
    return ExperimentResult(rows)


def run_fig3(config, jobs=1):
    """Spectral-efficiency CDFs per (K, L, lambda_b) tuple over a tau grid.

    For each tuple: simulated MMSE eta, eta_asym of the simulated P_K, and
    the analytic CDF; the matched-filter CDF is added for ``mf_tuple``.
    """
    if config.experiment is not Experiment.FIG3:
        raise ConfigError("run_fig3 needs a fig3_eta_cdf config")
    if config.sweep_param != "tau":
        raise ConfigError("fig3 sweeps tau")
    p = config.params
    tuples = [_parse_tuple(t) for t in config.extra_list("tuples")] or [(p.K, p.L, p.lam_b)]
    mf = _parse_tuple(config.extra("mf_tuple"))
    if mf not in tuples:
        tuples.append(mf)
    m_terms = int(config.extra("m_terms"))
    taus = np.asarray(config.sweep_values, dtype=float)
    rows = []
    for j, (K, L, lam_b) in enumerate(tuples):
        params = _params_with(p, K=K, L=L, lam_b=lam_b)
        samples = run_realizations(
            params, config.n_realizations, _seed_for(config.master_seed, j), jobs=jobs
        )
        n = len(samples)
        eta = np.array([s.eta for s in samples])
        eta_as = eta_asym(np.array([s.p_k for s in samples]), K, L, p.alpha, p.lam)
        analytic = eta_cdf_grid(taus, PkDistribution(K, lam_b, p.alpha, L, m_terms), p.lam)
        label = _tuple_label(K, L, lam_b)
        curves = [("sim_eta_cdf", _ecdf(eta, taus), n), ("asym_eta_cdf", _ecdf(eta_as, taus), n)]
        curves.append(("analytic_eta_cdf", analytic, 1))
        if (K, L, lam_b) == mf:
            eta_mf = np.array([s.eta_mf for s in samples])
            curves.append(("mf_eta_cdf", _ecdf(eta_mf, taus), n))
        for name, values, count in curves:
            for tau, v in zip(config.sweep_values, values):
                rows.append(_exact_row("tau", tau, f"{name}[{label}]", v, count))
    return ExperimentResult(rows)


def run_fig4(config, jobs=1):
    """Cell-edge spectral efficiency against alpha on the hexagonal grid."""
    if config.experiment is not Experiment.FIG4:
        raise ConfigError("run_fig4 needs a fig4_hex_alpha config")
    if config.sweep_param != "alpha":
        raise ConfigError("fig4 sweeps alpha")
    p = config.params
    ks = config.extra_list("K_list", int) or [p.K]
    for K in ks:
        if not 1 <= K <= MAX_HEX_K:
            raise ConfigError(f"hexagonal model supports K in [1, {MAX_HEX_K}], got {K}")
    sites = hex_grid_cell_edge(p.lam_b, p.region_radius)
    rows = []
    for a, alpha in enumerate(config.sweep_values):
        for b, K in enumerate(ks):
            params = _params_with(p, K=K, alpha=float(alpha), bs_model=BSModel.HEX_GRID_CELL_EDGE)
            analytic = cell_edge_eta(K, p.L, p.lam_b, p.lam, float(alpha))
            rows.append(_exact_row("alpha", alpha, f"eta_analytic[K={K}]", analytic))
            samples = run_realizations(
                params,
                config.n_realizations,
                _seed_for(config.master_seed, a, b),
                jobs=jobs,
                bs_positions=sites,
            )
            rows.append(_stat_row("alpha", alpha, f"eta_sim[K={K}]", [s.eta for s in samples]))
    return ExperimentResult(rows)


def run_pk_cdf_table(config, jobs=1):
    """Analytic CDF of P_K on a grid of x, with the truncation tail indicator."""
    if config.sweep_param != "x":
        raise ConfigError("pk_cdf_table sweeps x")
    p = config.params
    ks = config.extra_list("K_list", int) or [p.K]
    m_terms = int(config.extra("m_terms"))
    rows = []
    for K in ks:
        dist = PkDistribution(K, p.lam_b, p.alpha, p.L, m_terms)
        xs = [float(x) for x in config.sweep_values]
        values = dist.cdf_grid(xs)
        for x, v in zip(config.sweep_values, values):
            rows.append(_exact_row("x", x, f"pk_cdf[K={K}]", v))
            rows.append(_exact_row("x", x, f"pk_cdf_last_term[K={K}]", dist.evaluate(float(x)).last_term))
    return ExperimentResult(rows)


_DESIGN_SWEEPS = ("alpha", "K", "L", "lambda_b", "pk_out", "p_o")


def run_optimize_density(config, jobs=1):
    """Optimal active-mobile density over a sweep of one design parameter."""
    name = config.sweep_param
    if name not in _DESIGN_SWEEPS:
        raise ConfigError(f"optimize_density sweeps one of {', '.join(_DESIGN_SWEEPS)}")
    p = config.params
    fixed_pk = config.extra("pk_out")
    rows = []
    for v in config.sweep_values:
        alpha, K, L, lam_b = p.alpha, p.K, p.L, p.lam_b
        p_o = float(config.extra("p_o"))
        pk_out = float(fixed_pk) if fixed_pk else None
        if name == "alpha":
            alpha = float(v)
        elif name == "K":
            K = int(v)
        elif name == "L":
            L = int(v)
        elif name == "lambda_b":
            lam_b = float(v)
        elif name == "pk_out":
            pk_out = float(v)
        else:
            p_o = float(v)
        if pk_out is None:
            pk_out = outage_pk(p_o, PkDistribution(K, lam_b, alpha, L, int(config.extra("m_terms"))))
        lam_star = optimal_density(pk_out, K, L, alpha)
        rows.append(_exact_row(name, v, "pk_out", pk_out))
        rows.append(_exact_row(name, v, "lambda_star", lam_star))
        rows.append(_exact_row(name, v, "rate_density_at_optimum", rate_density(lam_star, pk_out, K, L, alpha)))
        rows.append(_exact_row(name, v, "sir_at_optimum", optimal_sir(alpha)))
    return ExperimentResult(rows)


CUSTOM_STATISTICS = (
    "sir_mmse_mean",
    "sir_mmse_median",
    "eta_mean",
    "eta_median",
    "eta_mf_median",
    "eta_asym_median",
    "normalized_sir_mean",
)


def run_custom(config, jobs=1):
    """Generic Monte Carlo sweep over one network parameter.

    Emits every statistic in ``CUSTOM_STATISTICS`` for each sweep value.
    """
    name = config.sweep_param
    if name not in PARAM_KEYS or name in ("region_radius", "bs_model"):
        raise ConfigError(f"unknown sweep parameter {name!r}")
    rows = []
    for a, v in enumerate(config.sweep_values):
        changes = {PARAM_KEYS[name]: v}
        if name in ("n_mobiles", "lambda"):
            changes["region_radius"] = None
        params = _params_with(config.params, **changes)
        samples = run_realizations(
            params, config.n_realizations, _seed_for(config.master_seed, a), jobs=jobs
        )
        n = len(samples)
        sir = np.array([s.sir_mmse for s in samples])
        eta = np.array([s.eta for s in samples])
        pk = np.array([s.p_k for s in samples])
        eta_as = eta_asym(pk, params.K, params.L, params.alpha, params.lam)
        norm = sir / (params.L ** (0.5 * params.alpha - 1.0) * pk)
        mf = np.array([s.eta_mf for s in samples])
        stats = {
            "sir_mmse_mean": (sir.mean(), sir.std()),
            "sir_mmse_median": (np.median(sir), sir.std()),
            "eta_mean": (eta.mean(), eta.std()),
            "eta_median": (np.median(eta), eta.std()),
            "eta_mf_median": (np.median(mf), mf.std()),
            "eta_asym_median": (np.median(eta_as), eta_as.std()),
            "normalized_sir_mean": (norm.mean(), norm.std()),
        }
        for stat in CUSTOM_STATISTICS:
            val, sd = stats[stat]
            rows.append(Row(name, v, stat, float(val), float(sd), n))
    return ExperimentResult(rows)


_RUNNERS = {
    Experiment.FIG2: run_fig2,
    Experiment.FIG3: run_fig3,
    Experiment.FIG4: run_fig4,
    Experiment.PK_CDF_TABLE: run_pk_cdf_table,
    Experiment.OPTIMIZE_DENSITY: run_optimize_density,
    Experiment.CUSTOM: run_custom,
}


def run_experiment(config, jobs=1):
    """Dispatch on ``config.experiment`` and attach provenance."""
    start = time.perf_counter()
    result = _RUNNERS[config.experiment](config, jobs=jobs)
    if not result.rows:
        raise ConfigError("experiment produced no rows")
    result.provenance = {
        "config": config_echo(config),
        "master_seed": config.master_seed,
        "version": version_string(),
        "wall_time_s": round(time.perf_counter() - start, 3),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return result


def result_to_csv(result):
    buf = io.StringIO()
    prov = result.provenance
    buf.write(f"# version: {prov.get('version', '')}\n")
    buf.write(f"# master_seed: {prov.get('master_seed', '')}\n")
    buf.write(f"# wall_time_s: {prov.get('wall_time_s', '')}\n")
    buf.write(f"# created: {prov.get('created', '')}\n")
    for line in prov.get("config", "").splitlines():
        buf.write(f"# config: {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def result_to_json(result):
    rows = [dict(zip(CSV_COLUMNS, r.cells())) for r in result.rows]
    for r, raw in zip(rows, result.rows):
        r["value"] = _json_float(raw.value)
        r["stddev"] = _json_float(raw.stddev)
        r["n_samples"] = raw.n_samples
    return json.dumps({"provenance": result.provenance, "rows": rows}, indent=1) + "\n"


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def write_result(result, path, fmt):
    text = result_to_csv(result) if fmt == "csv" else result_to_json(result)
    if path in ("", "-"):
        return text
    Path(path).write_text(text, encoding="utf-8")
    return text
