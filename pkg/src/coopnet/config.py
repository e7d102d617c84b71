"""Experiment configuration: a flat ``key = value`` text format.

Lines starting with ``#`` are comments.  Lists are comma separated.  The
canonical re-emission (``config_echo``) is embedded in every output file and
parses back to an identical config.
"""

import enum
from dataclasses import dataclass, field, replace

from .errors import ConfigError, ParameterError
from .geometry import BSModel, NetworkParams

__all__ = [
    "Experiment",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "config_echo",
    "PARAM_KEYS",
    "SWEEPABLE",
    "PAPER_SCALE",
]


class Experiment(str, enum.Enum):
    FIG2 = "fig2_normalized_sir"
    FIG3 = "fig3_eta_cdf"
    FIG4 = "fig4_hex_alpha"
    PK_CDF_TABLE = "pk_cdf_table"
    OPTIMIZE_DENSITY = "optimize_density"
    CUSTOM = "custom"


# config key -> NetworkParams field
PARAM_KEYS = {
    "lambda": "lam",
    "lambda_b": "lam_b",
    "alpha": "alpha",
    "K": "K",
    "L": "L",
    "n_mobiles": "n_mobiles",
    "region_radius": "region_radius",
    "bs_model": "bs_model",
}
_INT_PARAMS = {"K", "L", "n_mobiles"}
SWEEPABLE = ("lambda", "lambda_b", "alpha", "K", "L", "n_mobiles")

# experiment-specific extras and their defaults (as text)
EXTRA_DEFAULTS = {
    "K_list": "",
    "tuples": "",
    "mf_tuple": "32x25x0.4",
    "m_terms": "10",
    "p_o": "0.1",
    "pk_out": "",
}

PAPER_SCALE = {"n_mobiles": 30_000, "n_realizations": 10_000}

_GENERAL_KEYS = (
    "experiment",
    "sweep",
    "values",
    "n_realizations",
    "master_seed",
    "output_path",
    "output_format",
    "paper_scale",
)
KNOWN_KEYS = set(_GENERAL_KEYS) | set(PARAM_KEYS) | set(EXTRA_DEFAULTS)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: Experiment
    params: NetworkParams
    sweep_param: str
    sweep_values: tuple
    n_realizations: int = 500
    master_seed: int = 2024
    output_path: str = ""
    output_format: str = "csv"
    paper_scale: bool = False
    extras: dict = field(default_factory=dict)

    def extra(self, key):
        return self.extras.get(key, EXTRA_DEFAULTS[key])

    def extra_list(self, key, conv=str):
        raw = self.extra(key)
        return [conv(v.strip()) for v in raw.split(",") if v.strip()]


def _fmt(v):
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_number(text, key):
    try:
        if key in _INT_PARAMS or key in ("n_realizations", "master_seed", "m_terms"):
            val = int(text)
        else:
            val = float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None
    return val


def _parse_sweep_value(text, key):
    if key in SWEEPABLE:
        return _parse_number(text, key)
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(text, experiment=None):
    """Parse config text; ``experiment`` fills in or must match the file's value."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    exp_text = raw.get("experiment", experiment)
    if exp_text is None:
        raise ConfigError("no experiment given")
    if experiment is not None and exp_text != experiment:
        raise ConfigError(f"config is for {exp_text!r}, command asked for {experiment!r}")
    try:
        exp = Experiment(exp_text)
    except ValueError:
        valid = ", ".join(e.value for e in Experiment)
        raise ConfigError(f"unknown experiment {exp_text!r}; valid: {valid}") from None

    kwargs = {}
    for key, fname in PARAM_KEYS.items():
        if key not in raw:
            continue
        if key == "bs_model":
            try:
                kwargs[fname] = BSModel(raw[key])
            except ValueError:
                valid = ", ".join(m.value for m in BSModel)
                raise ConfigError(f"unknown bs_model {raw[key]!r}; valid: {valid}") from None
        else:
            kwargs[fname] = _parse_number(raw[key], key)

    paper_scale = raw.get("paper_scale", "false").lower() in ("1", "true", "yes")
    n_real = _parse_number(raw.get("n_realizations", "500"), "n_realizations")
    if paper_scale:
        kwargs["n_mobiles"] = PAPER_SCALE["n_mobiles"]
        kwargs.pop("region_radius", None)
        n_real = PAPER_SCALE["n_realizations"]
    try:
        params = NetworkParams(**kwargs)
    except ParameterError as exc:
        raise ConfigError(f"invalid network parameters: {exc}") from None

    sweep = raw.get("sweep")
    if not sweep:
        raise ConfigError("missing 'sweep' (name of the swept parameter)")
    values = [v.strip() for v in raw.get("values", "").split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep values are empty")
    if exp is Experiment.CUSTOM and sweep not in SWEEPABLE:
        raise ConfigError(f"unknown sweep parameter {sweep!r}; valid: {', '.join(SWEEPABLE)}")

    fmt = raw.get("output_format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output_format must be csv or json, got {fmt!r}")
    if n_real < 1:
        raise ConfigError("n_realizations must be positive")
    seed = _parse_number(raw.get("master_seed", "2024"), "master_seed")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("master_seed must be a 64-bit unsigned integer")

    extras = {k: raw[k] for k in EXTRA_DEFAULTS if k in raw}
    return ExperimentConfig(
        experiment=exp,
        params=params,
        sweep_param=sweep,
        sweep_values=tuple(_parse_sweep_value(v, sweep) for v in values),
        n_realizations=n_real,
        master_seed=seed,
        output_path=raw.get("output_path", ""),
        output_format=fmt,
        paper_scale=paper_scale,
        extras=extras,
    )


def load_config(path, experiment=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), experiment)


def config_echo(cfg):
    """Canonical text form of ``cfg``; ``parse_config`` inverts it."""
    p = cfg.params
    lines = [f"experiment = {cfg.experiment.value}"]
    for key, fname in PARAM_KEYS.items():
        lines.append(f"{key} = {_fmt(getattr(p, fname))}")
    lines.append(f"sweep = {cfg.sweep_param}")
    lines.append("values = " + ", ".join(_fmt(v) for v in cfg.sweep_values))
    # paper-scale values are already folded into params and n_realizations
    lines.append(f"n_realizations = {cfg.n_realizations}")
    lines.append(f"master_seed = {cfg.master_seed}")
    lines.append(f"output_path = {cfg.output_path}")
    lines.append(f"output_format = {cfg.output_format}")
    for key in sorted(cfg.extras):
        lines.append(f"{key} = {cfg.extras[key]}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg, seed=None, out=None, fmt=None, paper_scale=False):
    changes = {}
    if seed is not None:
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        changes["master_seed"] = int(seed)
    if out is not None:
        changes["output_path"] = out
    if fmt is not None:
        changes["output_format"] = fmt
    if paper_scale and not cfg.paper_scale:
        params = replace(cfg.params, n_mobiles=PAPER_SCALE["n_mobiles"], region_radius=None)
        changes.update(
            params=params, n_realizations=PAPER_SCALE["n_realizations"], paper_scale=True
        )
    return replace(cfg, **changes) if changes else cfg

