"""Angle-of-arrival estimation through the sensing path of the surface.

A single transmitter sends known unit-magnitude pilots; the surface couples a
fraction ``sensed_fraction`` of each atom's signal into one receive chain
through a per-snapshot analog combining vector.  Elevation is recovered by a
maximum-likelihood search that concentrates out the unknown complex path
amplitude, and is benchmarked against the matching Cramer-Rao bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, partial

import numpy as np

from .arrays import Direction, PlanarArray, steering_elevation_gradient, steering_grid, steering_vector
from .errors import EstimationInfeasibleError
from .hris import combiner_schedule
from .parallel import map_trials
from .rng import TAG_NOISE_HRIS, TAG_TRUTH, complex_normal, substream

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_UNIT_TOL = 1e-9

# Truth draws for the Monte Carlo sweep stay inside the search interval with a
# margin.  The upper limit keeps truths within the surface's usable field of
# view (about 54 degrees off broadside for the default grid): towards endfire
# cos(elevation) -> 0 makes the bound blow up and the error saturate, which
# would poison RMSE-versus-bound comparisons at any finite SNR.
_TRUTH_LO_FRAC = 0.05
_TRUTH_HI_FRAC = 0.60


@dataclass
class AoaScenario:
    """Snapshot model parameters for one estimation run.

    ``combiner`` holds one unit-modulus combining row per snapshot, shape
    (n_snapshots, n_atoms); ``pilot`` the known unit-magnitude symbols.  The
    transmit power is fixed at 1 and ``snr_db`` sets the per-snapshot noise
    variance to 10**(-snr_db/10); ``snr_db=inf`` gives a noiseless run.
    """

    array: PlanarArray
    sensed_fraction: float
    n_snapshots: int
    snr_db: float
    true_direction: Direction
    combiner: np.ndarray
    pilot: np.ndarray
    tx_power: float = 1.0

    def __post_init__(self):
        self.combiner = np.asarray(self.combiner, dtype=complex)
        self.pilot = np.asarray(self.pilot, dtype=complex)
        n = self.array.n_elements
        if not 0.0 < self.sensed_fraction <= 1.0:
            raise ValueError("sensed_fraction must lie in (0, 1]")
        if self.combiner.shape != (self.n_snapshots, n):
            raise ValueError(
                f"combiner must have shape ({self.n_snapshots}, {n}), got {self.combiner.shape}")
        if np.max(np.abs(np.abs(self.combiner) - 1.0)) > _UNIT_TOL:
            raise ValueError("combiner entries must have unit magnitude")
        if self.pilot.shape != (self.n_snapshots,):
            raise ValueError("pilot length must equal the number of snapshots")
        if np.max(np.abs(np.abs(self.pilot) - 1.0)) > _UNIT_TOL:
            raise ValueError("pilot symbols must have unit magnitude")
        if self.tx_power <= 0.0:
            raise ValueError("tx_power must be positive")

    @property
    def noise_var(self) -> float:
        if np.isinf(self.snr_db):
            return 0.0
        return self.tx_power * 10.0 ** (-self.snr_db / 10.0)


@dataclass(frozen=True)
class AoaGrid:
    """Coarse search grid plus golden-section refinement depth."""

    lo_rad: float = 0.0
    hi_rad: float = math.radians(89.75)
    n_points: int = 721
    refine_iters: int = 48

    def __post_init__(self):
        if not 0.0 <= self.lo_rad < self.hi_rad < math.pi / 2.0:
            raise ValueError("grid must satisfy 0 <= lo < hi < pi/2")
        if self.n_points < 2:
            raise ValueError("grid needs at least two points")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be non-negative")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo_rad, self.hi_rad, self.n_points)


def snapshot_scenario(array: PlanarArray, sensed_fraction: float, n_snapshots: int,
                      snr_db: float, true_direction: Direction,
                      combiner_kind: str = "random_phase",
                      schedule_seed: int = 0) -> AoaScenario:
    """Standard scenario: one combining row per snapshot, all-ones pilots.

    The default random-phase schedule has a dense spatial spectrum, so every
    snapshot carries angle information at every direction.  Single-row DFT
    combiners are selectable but make poor probes on a planar lattice: for a
    source in the azimuth-zero cut the vertical phase progression of most DFT
    rows sums to zero, leaving only every n_v-th row with any response.
    """
    rows = combiner_schedule(array.n_elements, 1, n_snapshots,
                             kind=combiner_kind, seed=schedule_seed)
    return AoaScenario(
        array=array,
        sensed_fraction=sensed_fraction,
        n_snapshots=n_snapshots,
        snr_db=snr_db,
        true_direction=true_direction,
        combiner=np.vstack(rows),
        pilot=np.ones(n_snapshots, dtype=complex),
    )


def _response(sc: AoaScenario, direction: Direction) -> np.ndarray:
    """Per-snapshot gain g_t = sqrt(f) * q_t^H a(direction)."""
    a = steering_vector(sc.array, direction)
    return math.sqrt(sc.sensed_fraction) * (np.conj(sc.combiner) @ a)


def noiseless_snapshots(sc: AoaScenario) -> np.ndarray:
    """Mean of the snapshot vector: g_t(theta*) * s_t * sqrt(tx_power)."""
    return _response(sc, sc.true_direction) * sc.pilot * math.sqrt(sc.tx_power)


def simulate_snapshots(sc: AoaScenario, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw one received snapshot vector (length n_snapshots)."""
    y = noiseless_snapshots(sc)
    var = sc.noise_var
    if var > 0.0:
        if rng is None:
            raise ValueError("a random generator is required at finite snr")
        y = y + complex_normal(rng, sc.n_snapshots, var=var)
    return y


def grid_response(sc: AoaScenario, grid: AoaGrid) -> np.ndarray:
    """Precompute q_t^H a(theta) over the whole grid, shape (T, n_points).

    The sqrt(sensed_fraction) factor is deliberately left out: it cancels in
    the location of the concentrated criterion's maximum, and leaving it out
    lets one precomputed table serve every sensed fraction.
    """
    mat = steering_grid(sc.array, grid.points, sc.true_direction.azimuth_rad)
    return np.conj(sc.combiner) @ mat


def _criterion_columns(y: np.ndarray, resp: np.ndarray, pilot: np.ndarray) -> np.ndarray:
    """Concentrated likelihood |sum_t y_t conj(g_t s_t)|^2 / sum_t |g_t s_t|^2 per column."""
    b = resp * pilot[:, None]
    num = np.abs(np.conj(b).T @ y) ** 2
    den = np.sum(np.abs(b) ** 2, axis=0)
    out = np.full(den.shape, -np.inf)
    ok = den > 0.0
    out[ok] = num[ok] / den[ok]
    return out


def _criterion_at(theta: float, y: np.ndarray, sc: AoaScenario) -> float:
    direction = Direction(theta, sc.true_direction.azimuth_rad)
    b = _response(sc, direction) * sc.pilot
    den = float(np.sum(np.abs(b) ** 2))
    if den <= 0.0:
        return -np.inf
    return float(np.abs(np.vdot(b, y)) ** 2 / den)


def ml_estimate(y: np.ndarray, sc: AoaScenario, grid: AoaGrid | None = None,
                response: np.ndarray | None = None) -> float:
    """Elevation estimate: coarse grid argmax plus golden-section refinement.

    Parameters
    ----------
    y : complex snapshot vector.
    sc : scenario the snapshots were produced under (true elevation unused,
        only the azimuth plane, combiner and pilots matter here).
    grid : search grid; defaults to AoaGrid().
    response : optional precomputed ``grid_response(sc, grid)`` table, which
        the Monte Carlo driver shares across trials.
    """
    grid = grid or AoaGrid()
    if response is None:
        response = grid_response(sc, grid)
    y = np.asarray(y, dtype=complex)
    if y.shape != (sc.n_snapshots,):
        raise ValueError("snapshot vector length does not match the scenario")
    crit = _criterion_columns(y, response, sc.pilot)
    if not np.any(np.isfinite(crit)):
        raise EstimationInfeasibleError(
            "combined response is zero everywhere on the search grid")
    points = grid.points
    i0 = int(np.argmax(crit))
    lo = points[max(i0 - 1, 0)]
    hi = points[min(i0 + 1, grid.n_points - 1)]
    return _golden_refine(lambda th: _criterion_at(th, y, sc), lo, hi,
                          grid.refine_iters)


def _golden_refine(f, lo: float, hi: float, iters: int) -> float:
    """Golden-section maximisation of a unimodal bracket."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
    return x1 if f1 >= f2 else x2


def crlb_elevation(sc: AoaScenario) -> float:
    """Elevation error variance bound with the path amplitude as nuisance.

    For mean mu_t = alpha * sqrt(P) * g_t(theta) * s_t the Fisher information
    of theta after removing the (Re alpha, Im alpha) block is
    (2 P / sigma^2) * Pperp with
    Pperp = sum|g'_t s_t|^2 - |sum g'_t conj(g_t) |s_t|^2|^2 / sum|g_t s_t|^2,
    evaluated at the true direction; the bound is its inverse.
    """
    d = sc.true_direction
    a_dot = steering_elevation_gradient(sc.array, d)
    root_f = math.sqrt(sc.sensed_fraction)
    g = _response(sc, d)
    g_dot = root_f * (np.conj(sc.combiner) @ a_dot)
    bs = g * sc.pilot
    bds = g_dot * sc.pilot
    den = float(np.sum(np.abs(bs) ** 2))
    total = float(np.sum(np.abs(bds) ** 2))
    if total <= 0.0 or den <= 0.0:
        raise EstimationInfeasibleError(
            "response does not change with elevation; bound undefined")
    pperp = total - abs(np.sum(bds * np.conj(bs))) ** 2 / den
    if pperp <= 1e-12 * total:
        raise EstimationInfeasibleError(
            "projected Fisher information is zero; elevation unidentifiable "
            "(amplitude nuisance absorbs the whole derivative)")
    return sc.noise_var / (2.0 * sc.tx_power * pperp)


# ---------------------------------------------------------------------------
# Monte Carlo sweep


@dataclass(frozen=True)
class _SweepSpec:
    seed: int
    sides: tuple
    fractions: tuple
    snrs_db: tuple
    n_snapshots: int
    spacing_m: float
    wavelength_m: float
    azimuth_rad: float
    grid: AoaGrid


@lru_cache(maxsize=8)
def _cell_tables(side: int, n_snapshots: int, spacing_m: float, wavelength_m: float,
                 azimuth_rad: float, grid: AoaGrid):
    """Per-array precomputation shared by all trials in a worker process."""
    arr = PlanarArray(side, side, spacing_m, wavelength_m)
    template = snapshot_scenario(arr, 1.0, n_snapshots, np.inf,
                                 Direction(0.0, azimuth_rad))
    return template, grid_response(template, grid)


def _sweep_trial(spec: _SweepSpec, trial: int):
    """One trial: shared truth and unit-noise draws, every cell estimated on them."""
    rng_truth = substream(spec.seed, "aoa_rmse", trial, TAG_TRUTH)
    span = spec.grid.hi_rad - spec.grid.lo_rad
    theta = spec.grid.lo_rad + span * float(
        rng_truth.uniform(_TRUTH_LO_FRAC, _TRUTH_HI_FRAC))
    noise_unit = complex_normal(
        substream(spec.seed, "aoa_rmse", trial, TAG_NOISE_HRIS), spec.n_snapshots)

    sq_err = np.empty((len(spec.sides), len(spec.fractions), len(spec.snrs_db)))
    bound = np.empty_like(sq_err)
    for i, side in enumerate(spec.sides):
        template, response = _cell_tables(side, spec.n_snapshots, spec.spacing_m,
                                          spec.wavelength_m, spec.azimuth_rad, spec.grid)
        direction = Direction(theta, spec.azimuth_rad)
        base = np.conj(template.combiner) @ steering_vector(template.array, direction)
        for j, fraction in enumerate(spec.fractions):
            sc = AoaScenario(
                array=template.array, sensed_fraction=fraction,
                n_snapshots=spec.n_snapshots, snr_db=np.inf,
                true_direction=direction, combiner=template.combiner,
                pilot=template.pilot)
            y0 = math.sqrt(fraction) * base
            for k, snr_db in enumerate(spec.snrs_db):
                sc.snr_db = snr_db
                y = y0 + math.sqrt(sc.noise_var) * noise_unit
                est = ml_estimate(y, sc, spec.grid, response=response)
                sq_err[i, j, k] = (est - theta) ** 2
                bound[i, j, k] = crlb_elevation(sc)
    return sq_err, bound


def rmse_experiment(n_list, sensed_fractions, n_snapshots: int, snr_db_grid,
                    n_trials: int, seed: int, workers: int = 1,
                    spacing_m: float = 0.004, wavelength_m: float = 0.01570,
                    azimuth_rad: float = 0.0, grid: AoaGrid | None = None) -> list[dict]:
    """Monte Carlo RMSE versus the bound over (array size, sensed fraction, snr).

    Array sizes are given as total element counts of square lattices.  Truth
    elevations are redrawn each trial; every cell of one trial shares the same
    truth and the same unit-variance noise draw (scaled per snr), so curves
    are paired and directly comparable.  Returns one row dict per cell in
    (N, fraction, snr) nesting order with keys matching the CSV columns.
    """
    sides = []
    for n in n_list:
        side = math.isqrt(int(n))
        if side * side != int(n):
            raise ValueError(f"array size {n} is not a perfect square")
        sides.append(side)
    spec = _SweepSpec(
        seed=int(seed), sides=tuple(sides),
        fractions=tuple(float(f) for f in sensed_fractions),
        snrs_db=tuple(float(s) for s in snr_db_grid),
        n_snapshots=int(n_snapshots), spacing_m=spacing_m,
        wavelength_m=wavelength_m, azimuth_rad=azimuth_rad,
        grid=grid or AoaGrid())
    results = map_trials(partial(_sweep_trial, spec), n_trials, workers)
    sq_err = np.stack([r[0] for r in results])
    bound = np.stack([r[1] for r in results])
    rmse = np.sqrt(np.mean(sq_err, axis=0))
    # The bound column is reported on the RMSE scale: sqrt of the variance
    # bound averaged over the same truth draws the errors were measured on.
    crlb = np.sqrt(np.mean(bound, axis=0))
    rows = []
    for i, n in enumerate(n_list):
        for j, fraction in enumerate(spec.fractions):
            for k, snr_db in enumerate(spec.snrs_db):
                rows.append({
                    "N": int(n),
                    "sensed_fraction": fraction,
                    "snr_db": snr_db,
                    "n_trials": int(n_trials),
                    "rmse_rad": float(rmse[i, j, k]),
                    "rmse_deg": float(np.degrees(rmse[i, j, k])),
                    "crlb_rad": float(crlb[i, j, k]),
                })
    return rows
