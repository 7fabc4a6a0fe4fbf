"""Run configuration: strict schema, presets, and YAML loading.

A configuration is a single key-value tree.  Parsing is strict: unknown keys
are rejected with their full dotted path, types are checked, and the tree
must carry the schema version it was written for.
"""

from __future__ import annotations

import math
import os
from copy import deepcopy
from dataclasses import dataclass, field

import yaml

from .aoa import AoaGrid
from .arrays import PlanarArray
from .channels import LinkGeometry
from .chest import ChestDims
from .errors import ConfigError

CONFIG_VERSION = 1

# Default carrier wavelength (metres) and lattice spacing of the bundled
# presets; 15.70 mm corresponds to a 19 GHz carrier.
DEFAULT_WAVELENGTH_M = 0.01570
DEFAULT_SPACING_M = 0.004

EXPERIMENTS = ("aoa_rmse", "chest_tradeoff", "rf_chain_sweep", "beampattern")

_DEFAULT_TRIALS = {"aoa_rmse": 500, "chest_tradeoff": 200, "rf_chain_sweep": 200,
                   "beampattern": 1}


@dataclass(frozen=True)
class AoaParams:
    n_list: tuple
    sensed_fractions: tuple
    n_snapshots: int
    snr_db_grid: tuple
    spacing_m: float
    wavelength_m: float
    azimuth_rad: float
    grid: AoaGrid


@dataclass(frozen=True)
class TradeoffParams:
    rho_grid: tuple
    n_phase_draws: int
    snr_db: float


@dataclass(frozen=True)
class RfSweepParams:
    n_rf_grid: tuple
    snr_db_list: tuple
    rho: float
    n_slots: int | None = None


@dataclass(frozen=True)
class BeamParams:
    steer_deg: float
    azimuth_deg: float
    n_points: int
    span_deg: float


@dataclass
class ExperimentConfig:
    """Fully validated run description."""

    experiment: str
    seed: int
    n_trials: int
    workers: int
    output_dir: str
    dump_channels: bool
    array: PlanarArray | None = None
    aoa: AoaParams | None = None
    chest_dims: ChestDims | None = None
    tradeoff: TradeoffParams | None = None
    rf_sweep: RfSweepParams | None = None
    beam: BeamParams | None = None
    raw: dict = field(default_factory=dict)


# --- low-level checked accessors -------------------------------------------


def _check_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"'{path}' must be a mapping, got {type(node).__name__}")
    return node


def _check_keys(node: dict, allowed, path: str) -> None:
    for key in node:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}.{key}'" if path else
                              f"unknown key '{key}'")


_MISSING = object()


def _get(node: dict, key: str, kind, path: str, default=_MISSING):
    if key not in node:
        if default is _MISSING:
            raise ConfigError(f"missing required key '{path}.{key}'" if path else
                              f"missing required key '{key}'")
        return default
    value = node[key]
    full = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"'{full}' must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"'{full}' must be an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"'{full}' must be a boolean, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"'{full}' must be a string, got {value!r}")
        return value
    raise AssertionError(kind)


def _get_number_list(node: dict, key: str, path: str, default=_MISSING,
                     integer: bool = False) -> tuple:
    if key not in node:
        if default is _MISSING:
            raise ConfigError(f"missing required key '{path}.{key}'")
        return tuple(default)
    value = node[key]
    full = f"{path}.{key}" if path else key
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"'{full}' must be a non-empty list of numbers")
    out = []
    for i, entry in enumerate(value):
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise ConfigError(f"'{full}[{i}]' must be a number, got {entry!r}")
        if integer:
            if not isinstance(entry, int):
                raise ConfigError(f"'{full}[{i}]' must be an integer, got {entry!r}")
            out.append(int(entry))
        else:
            out.append(float(entry))
    return tuple(out)


# --- section parsers --------------------------------------------------------


def _parse_array(node, path="array") -> PlanarArray:
    node = _check_mapping(node, path)
    _check_keys(node, {"n_h", "n_v", "spacing_m", "wavelength_m"}, path)
    try:
        return PlanarArray(
            n_h=_get(node, "n_h", int, path),
            n_v=_get(node, "n_v", int, path),
            spacing_m=_get(node, "spacing_m", float, path, DEFAULT_SPACING_M),
            wavelength_m=_get(node, "wavelength_m", float, path, DEFAULT_WAVELENGTH_M),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid '{path}': {exc}") from exc


def _parse_channel(node, path="channel") -> tuple[ChestDims, float | None]:
    node = _check_mapping(node, path)
    _check_keys(node, {"cell_radius_m", "hris_bs_distance_m", "carrier_hz",
                       "pathloss", "rician_k", "n_atoms", "n_users",
                       "n_bs_antennas"}, path)
    try:
        geom = LinkGeometry(
            cell_radius_m=_get(node, "cell_radius_m", float, path, 10.0),
            hris_bs_distance_m=_get(node, "hris_bs_distance_m", float, path, 50.0),
            carrier_hz=_get(node, "carrier_hz", float, path, 19e9),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid '{path}': {exc}") from exc
    pathloss_model = _get(node, "pathloss", str, path, "none")
    if pathloss_model not in ("free_space", "none"):
        raise ConfigError(f"'{path}.pathloss' must be 'free_space' or 'none'")
    rician = node.get("rician_k")
    if rician is not None:
        rician = _get(node, "rician_k", float, path)
        if rician < 0.0:
            raise ConfigError(f"'{path}.rician_k' must be non-negative")
    dims = ChestDims(
        n_atoms=_get(node, "n_atoms", int, path, 64),
        n_users=_get(node, "n_users", int, path, 8),
        n_bs_antennas=_get(node, "n_bs_antennas", int, path, 16),
        pathloss_model=pathloss_model,
        geom=geom,
    )
    return dims, rician


def _parse_aoa(node, path="aoa") -> AoaParams:
    node = _check_mapping(node, path)
    _check_keys(node, {"n_list", "sensed_fractions", "n_snapshots", "snr_db_grid",
                       "spacing_m", "wavelength_m", "azimuth_deg", "grid"}, path)
    n_list = _get_number_list(node, "n_list", path, integer=True)
    for n in n_list:
        if math.isqrt(n) ** 2 != n:
            raise ConfigError(f"'{path}.n_list' entries must be perfect squares, got {n}")
    fractions = _get_number_list(node, "sensed_fractions", path)
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ConfigError(f"'{path}.sensed_fractions' entries must lie in (0, 1]")
    grid = AoaGrid()
    if "grid" in node:
        gnode = _check_mapping(node["grid"], f"{path}.grid")
        _check_keys(gnode, {"lo_deg", "hi_deg", "n_points", "refine_iters"}, f"{path}.grid")
        try:
            grid = AoaGrid(
                lo_rad=math.radians(_get(gnode, "lo_deg", float, f"{path}.grid", 0.0)),
                hi_rad=math.radians(_get(gnode, "hi_deg", float, f"{path}.grid", 89.75)),
                n_points=_get(gnode, "n_points", int, f"{path}.grid", 721),
                refine_iters=_get(gnode, "refine_iters", int, f"{path}.grid", 48),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid '{path}.grid': {exc}") from exc
    return AoaParams(
        n_list=n_list,
        sensed_fractions=fractions,
        n_snapshots=_get(node, "n_snapshots", int, path, 64),
        snr_db_grid=_get_number_list(node, "snr_db_grid", path,
                                     default=tuple(range(-10, 31, 5))),
        spacing_m=_get(node, "spacing_m", float, path, DEFAULT_SPACING_M),
        wavelength_m=_get(node, "wavelength_m", float, path, DEFAULT_WAVELENGTH_M),
        azimuth_rad=math.radians(_get(node, "azimuth_deg", float, path, 0.0)),
        grid=grid,
    )


def _parse_tradeoff(node, path="tradeoff"):
    node = _check_mapping(node, path)
    _check_keys(node, {"rho_grid", "n_phase_draws", "snr_db", "n_rf_chains",
                       "pilot_count"}, path)
    rho_grid = _get_number_list(node, "rho_grid", path,
                                default=tuple(round(0.1 * i, 1) for i in range(1, 10)))
    for r in rho_grid:
        if not 0.0 < r < 1.0:
            raise ConfigError(f"'{path}.rho_grid' entries must lie strictly in (0, 1)")
    params = TradeoffParams(
        rho_grid=rho_grid,
        n_phase_draws=_get(node, "n_phase_draws", int, path, 3),
        snr_db=_get(node, "snr_db", float, path, 30.0),
    )
    extras = {
        "n_rf_chains": _get(node, "n_rf_chains", int, path, 8),
        "pilot_count": _get(node, "pilot_count", int, path, 70),
    }
    return params, extras


def _parse_rf_sweep(node, path="rf_sweep"):
    node = _check_mapping(node, path)
    _check_keys(node, {"n_rf_grid", "snr_db_list", "rho", "n_slots"}, path)
    rho = _get(node, "rho", float, path, 0.5)
    if not 0.0 < rho < 1.0:
        raise ConfigError(f"'{path}.rho' must lie strictly in (0, 1)")
    n_slots = _get(node, "n_slots", int, path, None)
    if n_slots is not None and n_slots < 1:
        raise ConfigError(f"'{path}.n_slots' must be a positive count")
    return RfSweepParams(
        n_rf_grid=_get_number_list(node, "n_rf_grid", path, default=(1, 2, 4, 8),
                                   integer=True),
        snr_db_list=_get_number_list(node, "snr_db_list", path, default=(0.0, 10.0)),
        rho=rho,
        n_slots=n_slots,
    )


def _parse_beam(node, path="beampattern") -> BeamParams:
    node = _check_mapping(node, path)
    _check_keys(node, {"steer_deg", "azimuth_deg", "n_points", "span_deg"}, path)
    steer = _get(node, "steer_deg", float, path, 0.0)
    span = _get(node, "span_deg", float, path, 90.0)
    if not 0.0 < span <= 90.0:
        raise ConfigError(f"'{path}.span_deg' must lie in (0, 90]")
    if abs(steer) >= 90.0:
        raise ConfigError(f"'{path}.steer_deg' must lie in (-90, 90)")
    n_points = _get(node, "n_points", int, path, 1441)
    if n_points < 2:
        raise ConfigError(f"'{path}.n_points' must be at least 2")
    return BeamParams(
        steer_deg=steer,
        azimuth_deg=_get(node, "azimuth_deg", float, path, 0.0),
        n_points=n_points,
        span_deg=span,
    )


# --- top level --------------------------------------------------------------

_SECTIONS_BY_EXPERIMENT = {
    "aoa_rmse": {"aoa"},
    "chest_tradeoff": {"channel", "tradeoff"},
    "rf_chain_sweep": {"channel", "rf_sweep"},
    "beampattern": {"array", "beampattern"},
}
_COMMON_KEYS = {"version", "experiment", "seed", "workers", "n_trials",
                "output_dir", "dump_channels"}


def parse_config_tree(tree: dict, source: str = "config") -> ExperimentConfig:
    """Validate a raw configuration tree into an ExperimentConfig."""
    tree = _check_mapping(tree, source)
    version = _get(tree, "version", int, "")
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version}; this build "
                          f"reads version {CONFIG_VERSION}")
    experiment = _get(tree, "experiment", str, "")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"'experiment' must be one of {', '.join(EXPERIMENTS)}; "
                          f"got {experiment!r}")
    allowed = _COMMON_KEYS | _SECTIONS_BY_EXPERIMENT[experiment]
    _check_keys(tree, allowed, "")

    workers_raw = tree.get("workers", 1)
    if workers_raw == "auto":
        workers = os.cpu_count() or 1
    elif isinstance(workers_raw, int) and not isinstance(workers_raw, bool) \
            and workers_raw >= 1:
        workers = workers_raw
    else:
        raise ConfigError(f"'workers' must be a positive integer or 'auto', "
                          f"got {workers_raw!r}")

    n_trials = _get(tree, "n_trials", int, "", _DEFAULT_TRIALS[experiment])
    if n_trials < 1:
        raise ConfigError("'n_trials' must be at least 1")

    cfg = ExperimentConfig(
        experiment=experiment,
        seed=_get(tree, "seed", int, "", 0),
        n_trials=n_trials,
        workers=workers,
        output_dir=_get(tree, "output_dir", str, "", "results"),
        dump_channels=_get(tree, "dump_channels", bool, "", False),
        raw=deepcopy(tree),
    )

    if experiment == "aoa_rmse":
        cfg.aoa = _parse_aoa(tree.get("aoa", {}))
    elif experiment == "beampattern":
        if "array" not in tree:
            raise ConfigError("beampattern runs need an 'array' section")
        cfg.array = _parse_array(tree["array"])
        cfg.beam = _parse_beam(tree.get("beampattern", {}))
    else:
        dims, rician = _parse_channel(tree.get("channel", {}))
        if rician is not None:
            raise ConfigError("'channel.rician_k' is not supported for the "
                              "estimation sweeps; leave it unset")
        if experiment == "chest_tradeoff":
            params, extras = _parse_tradeoff(tree.get("tradeoff", {}))
            cfg.tradeoff = params
            dims = ChestDims(
                n_atoms=dims.n_atoms, n_users=dims.n_users,
                n_bs_antennas=dims.n_bs_antennas,
                n_rf_chains=extras["n_rf_chains"],
                pilot_count=extras["pilot_count"],
                pathloss_model=dims.pathloss_model, geom=dims.geom)
        else:
            params = _parse_rf_sweep(tree.get("rf_sweep", {}))
            cfg.rf_sweep = params
            n_slots = params.n_slots if params.n_slots is not None else dims.n_atoms
            dims = ChestDims(
                n_atoms=dims.n_atoms, n_users=dims.n_users,
                n_bs_antennas=dims.n_bs_antennas,
                n_rf_chains=max(params.n_rf_grid),
                pilot_count=n_slots * dims.n_users,
                pathloss_model=dims.pathloss_model, geom=dims.geom)
        cfg.chest_dims = dims
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a YAML configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            tree = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ConfigError(f"YAML syntax error in {path}{where}: {exc}") from exc
    if tree is None:
        raise ConfigError(f"config file {path} is empty")
    return parse_config_tree(tree, source=str(path))


# --- presets ----------------------------------------------------------------

PRESETS: dict[str, dict] = {
    # Angle-of-arrival accuracy versus the bound for two aperture sizes and
    # two sensed power fractions.
    "fig4": {
        "version": 1,
        "experiment": "aoa_rmse",
        "seed": 20260823,
        "n_trials": 500,
        "aoa": {
            "n_list": [144, 400],
            "sensed_fractions": [0.2, 0.8],
            "n_snapshots": 64,
            "snr_db_grid": [-10, -5, 0, 5, 10, 15, 20, 25, 30],
        },
    },
    # Power-split trade-off between the two estimation stages.
    "fig5": {
        "version": 1,
        "experiment": "chest_tradeoff",
        "seed": 20260823,
        "n_trials": 200,
        "channel": {"n_atoms": 64, "n_users": 8, "n_bs_antennas": 16,
                    "pathloss": "none"},
        "tradeoff": {"rho_grid": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
                     "n_phase_draws": 3, "snr_db": 30.0,
                     "n_rf_chains": 8, "pilot_count": 70},
    },
    # Cascaded estimation quality versus the number of receive chains.
    "fig6": {
        "version": 1,
        "experiment": "rf_chain_sweep",
        "seed": 20260823,
        "n_trials": 200,
        "channel": {"n_atoms": 64, "n_users": 8, "n_bs_antennas": 16,
                    "pathloss": "none"},
        "rf_sweep": {"n_rf_grid": [1, 2, 4, 8], "snr_db_list": [0.0, 10.0],
                     "rho": 0.5},
    },
}


def preset_config(name: str) -> ExperimentConfig:
    """Return the validated configuration of a bundled preset."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: "
                          f"{', '.join(sorted(PRESETS))}")
    return parse_config_tree(deepcopy(PRESETS[name]), source=f"preset:{name}")
