"""Two-sided pilot-based channel estimation through a hybrid surface.

The surface first estimates the terminals-to-surface channel H from its own
sensed observations, then the base station estimates the surface-to-base
channel G from reflected pilots using the forwarded H estimate.  Both stages
are plain least squares over a slotted schedule: within a slot the terminals
repeat one orthogonal pilot block while the surface holds one combiner and
one reflection pattern; both are switched between slots.  The same transmitted
pilots therefore serve both estimation stages.

A purely reflective surface (rho = 1 everywhere, no sensing) serves as the
baseline: the base station then has to estimate every per-user cascaded
matrix directly, which needs far more pilots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache, partial

import numpy as np
from scipy.linalg import dft

from .channels import ChannelSet, LinkGeometry, cascaded_per_user, draw_channels
from .errors import EstimationInfeasibleError, IdentifiabilityError
from .hris import HrisConfig, build_signals, combiner_schedule
from .parallel import map_trials
from .rng import (TAG_CHANNEL, TAG_NOISE_BASELINE, TAG_NOISE_BS, TAG_NOISE_HRIS,
                  TAG_PHASES, complex_normal, substream)


@dataclass
class PilotSchedule:
    """Orthogonal pilot block plus the per-slot surface configurations.

    ``pilots`` is the (n_users, n_users) unit-modulus block X with
    X^H X = n_users * I; slot t transmits sqrt(tx_power) * X while the
    surface applies ``hris_configs[t]``.
    """

    n_slots: int
    pilots: np.ndarray
    hris_configs: list[HrisConfig]

    @property
    def n_users(self) -> int:
        return self.pilots.shape[0]

    @property
    def pilot_count(self) -> int:
        """Total pilot symbols spent: slots times block length."""
        return self.n_slots * self.n_users


@dataclass
class EstimationReport:
    """Normalised squared errors of one two-sided estimation run."""

    nmse_H: float
    nmse_G: float
    nmse_cascaded: float
    pilot_count: int
    rho: float
    n_rf_chains: int


def nmse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Squared Frobenius error over squared Frobenius norm of the truth."""
    err = np.linalg.norm(estimate - truth) ** 2
    ref = np.linalg.norm(truth) ** 2
    if ref == 0.0:
        raise ValueError("truth matrix is identically zero")
    return float(err / ref)


def build_pilot_schedule(n_atoms: int, n_users: int, n_rf_chains: int,
                         pilot_count: int, rho: float,
                         base_reflect_phase: np.ndarray | float = 0.0,
                         sense_phase: float = 0.0,
                         combiner_kind: str = "dft") -> PilotSchedule:
    """Assemble the slotted schedule for a given pilot budget.

    The budget is rounded up to whole slots: n_slots = ceil(pilot_count /
    n_users).  Combiners follow the cycling row-block DFT schedule; the
    reflection pattern of slot t adds the phases of DFT row (t mod n_atoms)
    on top of ``base_reflect_phase``, so reflected pilots vary across slots
    (the base station stage needs that variation to see all atoms).
    """
    if pilot_count < 1:
        raise ValueError("pilot_count must be positive")
    n_slots = math.ceil(pilot_count / n_users)
    combiners = combiner_schedule(n_atoms, n_rf_chains, n_slots, kind=combiner_kind)
    base = np.broadcast_to(np.asarray(base_reflect_phase, dtype=float), (n_atoms,))
    dft_phase = -2.0 * np.pi * np.arange(n_atoms) / n_atoms
    configs = []
    for t in range(n_slots):
        configs.append(HrisConfig(
            n_atoms=n_atoms,
            rho=np.full(n_atoms, float(rho)),
            reflect_phase=base + (t % n_atoms) * dft_phase,
            sense_phase=np.full(n_atoms, float(sense_phase)),
            n_rf_chains=n_rf_chains,
            combiner=combiners[t],
        ))
    return PilotSchedule(n_slots=n_slots, pilots=dft(n_users), hris_configs=configs)


def _decorrelate(block: np.ndarray, pilots: np.ndarray, amplitude: float) -> np.ndarray:
    """Undo the pilot block: Y X^H / (K * amplitude) for X = amplitude * pilots."""
    k = pilots.shape[0]
    return block @ np.conj(pilots.T) / (k * amplitude)


def hris_estimate_H(sched: PilotSchedule, ch: ChannelSet, rng: np.random.Generator,
                    allow_rank_deficient: bool = False):
    """Estimate the terminals-to-surface channel from sensed pilot slots.

    Simulates the sensed observations Y_t = Q_t S H X + N_t for every slot,
    decorrelates the pilot block and solves the stacked least squares for
    S H, then divides out the sensing diagonal S.  Returns ``(H_hat,
    slot_observations)`` with the raw per-slot observation blocks retained.

    Raises IdentifiabilityError when the stacked combiner does not reach rank
    n_atoms (unless ``allow_rank_deficient`` asks for the minimum-norm
    solution instead) and EstimationInfeasibleError when some atom senses
    nothing (rho = 1) so its row of H cannot be recovered.
    """
    n_atoms = sched.hris_configs[0].n_atoms
    amp = math.sqrt(ch.tx_power)
    incident = ch.H @ (amp * sched.pilots)

    first = sched.hris_configs[0]
    sensed_diag = np.sqrt(1.0 - first.rho) * np.exp(1j * first.sense_phase)
    if np.any(np.abs(sensed_diag) == 0.0):
        raise EstimationInfeasibleError(
            "atoms with rho = 1 leave no sensed signal; their rows of H are unrecoverable")

    observations = []
    decorr = []
    combiners = []
    for cfg in sched.hris_configs:
        block = build_signals(cfg).sensed_map @ incident
        if ch.noise_var_hris > 0.0:
            block = block + complex_normal(rng, block.shape, var=ch.noise_var_hris)
        observations.append(block)
        decorr.append(_decorrelate(block, sched.pilots, amp))
        combiners.append(cfg.combiner)

    stacked_q = np.vstack(combiners)
    stacked_y = np.vstack(decorr)
    sh_hat, _, rank, _ = np.linalg.lstsq(stacked_q, stacked_y, rcond=None)
    if rank < n_atoms and not allow_rank_deficient:
        raise IdentifiabilityError(
            f"stacked combiner rank {rank} < {n_atoms} atoms over {sched.n_slots} "
            f"slots; the sensed system needs ceil(n_atoms / n_rf_chains) slots "
            f"(n_atoms * n_users / n_rf_chains pilot symbols)")
    h_hat = sh_hat / sensed_diag[:, None]
    return h_hat, observations


def bs_estimate_G(sched: PilotSchedule, ch: ChannelSet, h_hat: np.ndarray,
                  rng: np.random.Generator, allow_rank_deficient: bool = False) -> np.ndarray:
    """Estimate the surface-to-base channel from reflected pilot slots.

    The base station observes Y_t = G R_t H X + N_t with R_t the slot's
    reflection diagonal.  Using the forwarded estimate of H it forms the
    known regressors Z_t = R_t H_hat X and solves min_G sum_t
    ||Y_t - G Z_t||_F^2 in one stacked least squares.
    """
    n_atoms = sched.hris_configs[0].n_atoms
    amp = math.sqrt(ch.tx_power)
    pilot_block = amp * sched.pilots

    blocks = []
    regressors = []
    for cfg in sched.hris_configs:
        refl = np.sqrt(cfg.rho) * np.exp(1j * cfg.reflect_phase)
        block = (ch.G * refl) @ (ch.H @ pilot_block)
        if ch.noise_var_bs > 0.0:
            block = block + complex_normal(rng, block.shape, var=ch.noise_var_bs)
        blocks.append(block)
        regressors.append(refl[:, None] * (h_hat @ pilot_block))

    stacked_z = np.hstack(regressors)
    stacked_y = np.hstack(blocks)
    gt_hat, _, rank, _ = np.linalg.lstsq(stacked_z.T, stacked_y.T, rcond=None)
    if rank < n_atoms and not allow_rank_deficient:
        raise IdentifiabilityError(
            f"stacked reflection regressors rank {rank} < {n_atoms} atoms over "
            f"{sched.n_slots} slots; G is not identifiable (need n_slots * n_users "
            f">= n_atoms and a non-degenerate reflection pattern, rho > 0)")
    return gt_hat.T


def run_two_sided(sched: PilotSchedule, ch: ChannelSet,
                  rng_hris: np.random.Generator, rng_bs: np.random.Generator,
                  allow_rank_deficient: bool = False):
    """Run both estimation stages and score them against the drawn truth."""
    h_hat, _ = hris_estimate_H(sched, ch, rng_hris, allow_rank_deficient)
    g_hat = bs_estimate_G(sched, ch, h_hat, rng_bs, allow_rank_deficient)
    report = EstimationReport(
        nmse_H=nmse(h_hat, ch.H),
        nmse_G=nmse(g_hat, ch.G),
        nmse_cascaded=cascaded_nmse(h_hat, g_hat, ch),
        pilot_count=sched.pilot_count,
        rho=float(sched.hris_configs[0].rho[0]),
        n_rf_chains=sched.hris_configs[0].n_rf_chains,
    )
    return h_hat, g_hat, report


def cascaded_nmse(h_hat: np.ndarray, g_hat: np.ndarray, ch: ChannelSet) -> float:
    """NMSE of the composed per-user cascades G_hat diag(h_hat_k) over all users."""
    err = 0.0
    ref = 0.0
    for k in range(ch.H.shape[1]):
        truth = cascaded_per_user(ch.H, ch.G, k)
        est = g_hat * h_hat[:, k]
        err += np.linalg.norm(est - truth) ** 2
        ref += np.linalg.norm(truth) ** 2
    return float(err / ref)


def cascaded_ls_baseline(ch: ChannelSet, pilot_count: int, rng: np.random.Generator):
    """Purely reflective baseline: per-user least squares on the cascade.

    The surface reflects everything (rho = 1) and cycles DFT phase patterns;
    the base station solves A_k Phi = observations for each user's (M,
    n_atoms) cascade matrix.  Each slot contributes one pattern, so
    identifiability needs at least n_atoms slots, i.e. n_atoms * n_users
    pilot symbols.  Returns the list of per-user estimates.
    """
    n_atoms = ch.H.shape[0]
    n_users = ch.H.shape[1]
    n_slots = pilot_count // n_users
    if n_slots < n_atoms:
        m = ch.G.shape[0]
        raise IdentifiabilityError(
            f"cascaded least squares underdetermined at a {pilot_count}-pilot "
            f"budget: {m * n_atoms} unknowns per user vs {m * n_slots} equations "
            f"({n_slots} slots); need at least {n_atoms} slots "
            f"({n_atoms * n_users} pilot symbols)")
    amp = math.sqrt(ch.tx_power)
    pilots = dft(n_users)
    patterns = dft(n_atoms)[np.mod(np.arange(n_slots), n_atoms), :]  # (slots, N)

    decorr = []
    for t in range(n_slots):
        block = (ch.G * patterns[t]) @ (ch.H @ (amp * pilots))
        if ch.noise_var_bs > 0.0:
            block = block + complex_normal(rng, block.shape, var=ch.noise_var_bs)
        decorr.append(_decorrelate(block, pilots, amp))

    stacked = np.stack(decorr)  # (slots, M, K)
    phi = patterns.T  # (N, slots)
    estimates = []
    for k in range(n_users):
        b_k = stacked[:, :, k].T  # (M, slots) = A_k @ phi
        a_t, _, rank, _ = np.linalg.lstsq(phi.T, b_k.T, rcond=None)
        if rank < n_atoms:
            raise IdentifiabilityError(
                f"reflection pattern matrix rank {rank} < {n_atoms}")
        estimates.append(a_t.T)
    return estimates


def baseline_cascaded_nmse(estimates: list[np.ndarray], ch: ChannelSet) -> float:
    err = 0.0
    ref = 0.0
    for k, est in enumerate(estimates):
        truth = cascaded_per_user(ch.H, ch.G, k)
        err += np.linalg.norm(est - truth) ** 2
        ref += np.linalg.norm(truth) ** 2
    return float(err / ref)


# ---------------------------------------------------------------------------
# Monte Carlo experiments


@dataclass(frozen=True)
class ChestDims:
    n_atoms: int = 64
    n_users: int = 8
    n_bs_antennas: int = 16
    n_rf_chains: int = 8
    pilot_count: int = 70
    pathloss_model: str = "none"
    geom: LinkGeometry = LinkGeometry()


@lru_cache(maxsize=64)
def _cached_schedule(seed: int, draw: int, rho: float, n_atoms: int, n_users: int,
                     n_rf_chains: int, pilot_count: int) -> PilotSchedule:
    """Schedule for one (phase draw, rho) cell; base phases keyed by draw id only."""
    base = substream(seed, "chest_tradeoff", draw, TAG_PHASES).uniform(
        0.0, 2.0 * np.pi, size=n_atoms)
    return build_pilot_schedule(n_atoms, n_users, n_rf_chains, pilot_count, rho,
                                base_reflect_phase=base)


@dataclass(frozen=True)
class _TradeoffSpec:
    seed: int
    rhos: tuple
    n_draws: int
    snr_db: float
    dims: ChestDims


def _tradeoff_trial(spec: _TradeoffSpec, trial: int):
    d = spec.dims
    ch = draw_channels(
        d.geom, d.n_atoms, d.n_users, d.n_bs_antennas,
        substream(spec.seed, "chest_tradeoff", trial, TAG_CHANNEL),
        tx_power=10.0 ** (spec.snr_db / 10.0),
        pathloss_model=d.pathloss_model)
    out = np.empty((len(spec.rhos), spec.n_draws, 2))
    for j in range(spec.n_draws):
        for i, rho in enumerate(spec.rhos):
            sched = _cached_schedule(spec.seed, j, rho, d.n_atoms, d.n_users,
                                     d.n_rf_chains, d.pilot_count)
            # Noise substreams are re-derived per cell: every (rho, draw) cell
            # of one trial sees identical noise, so curves are paired.
            h_hat, _ = hris_estimate_H(
                sched, ch, substream(spec.seed, "chest_tradeoff", trial, TAG_NOISE_HRIS))
            g_hat = bs_estimate_G(
                sched, ch, h_hat,
                substream(spec.seed, "chest_tradeoff", trial, TAG_NOISE_BS))
            out[i, j, 0] = nmse(h_hat, ch.H)
            out[i, j, 1] = nmse(g_hat, ch.G)
    return out


def tradeoff_experiment(rho_grid, n_phase_draws: int, n_trials: int, seed: int,
                        workers: int = 1, snr_db: float = 30.0,
                        dims: ChestDims | None = None) -> list[dict]:
    """Sweep the power split: estimation quality of both stages versus rho.

    For every rho and every random per-atom reflection phase configuration
    the two-sided estimator runs over ``n_trials`` paired channel draws.
    Returns one row per (rho, phase_draw) with mean NMSEs, linear and dB.
    """
    dims = dims or ChestDims()
    spec = _TradeoffSpec(seed=int(seed), rhos=tuple(float(r) for r in rho_grid),
                         n_draws=int(n_phase_draws), snr_db=float(snr_db), dims=dims)
    results = np.stack(map_trials(partial(_tradeoff_trial, spec), n_trials, workers))
    means = results.mean(axis=0)  # (rho, draw, 2)
    rows = []
    for i, rho in enumerate(spec.rhos):
        for j in range(spec.n_draws):
            nm_h, nm_g = means[i, j]
            rows.append({
                "rho": rho,
                "phase_draw": j,
                "nmse_H": float(nm_h),
                "nmse_H_db": 10.0 * math.log10(nm_h),
                "nmse_G": float(nm_g),
                "nmse_G_db": 10.0 * math.log10(nm_g),
            })
    return rows


@dataclass(frozen=True)
class _SweepSpec:
    seed: int
    nr_grid: tuple
    snrs_db: tuple
    rho: float
    n_slots: int
    dims: ChestDims


@lru_cache(maxsize=64)
def _sweep_schedule(rho: float, n_rf: int, n_atoms: int, n_users: int,
                    pilot_count: int) -> PilotSchedule:
    return build_pilot_schedule(n_atoms, n_users, n_rf, pilot_count, rho)


def _sweep_trial(spec: _SweepSpec, trial: int):
    d = spec.dims
    pilot_count = spec.n_slots * d.n_users
    ch0 = draw_channels(
        d.geom, d.n_atoms, d.n_users, d.n_bs_antennas,
        substream(spec.seed, "rf_chain_sweep", trial, TAG_CHANNEL),
        pathloss_model=d.pathloss_model)
    casc = np.empty((len(spec.nr_grid), len(spec.snrs_db)))
    base = np.full(len(spec.snrs_db), np.nan)
    for s, snr_db in enumerate(spec.snrs_db):
        ch = replace(ch0, tx_power=10.0 ** (snr_db / 10.0))
        try:
            est = cascaded_ls_baseline(
                ch, pilot_count,
                substream(spec.seed, "rf_chain_sweep", trial, TAG_NOISE_BASELINE))
            base[s] = baseline_cascaded_nmse(est, ch)
        except IdentifiabilityError:
            pass
        for i, n_rf in enumerate(spec.nr_grid):
            sched = _sweep_schedule(spec.rho, n_rf, d.n_atoms, d.n_users,
                                    pilot_count)
            h_hat, _ = hris_estimate_H(
                sched, ch, substream(spec.seed, "rf_chain_sweep", trial, TAG_NOISE_HRIS))
            g_hat = bs_estimate_G(
                sched, ch, h_hat,
                substream(spec.seed, "rf_chain_sweep", trial, TAG_NOISE_BS))
            casc[i, s] = cascaded_nmse(h_hat, g_hat, ch)
    return casc, base


def rf_chain_sweep(nr_grid, snr_db_list, n_trials: int, seed: int,
                   workers: int = 1, rho: float = 0.5,
                   dims: ChestDims | None = None,
                   n_slots: int | None = None) -> list[dict]:
    """Cascaded estimation quality versus the number of surface receive chains.

    The slot schedule is held fixed (``n_slots`` defaults to the atom count,
    keeping the sensing stage identifiable down to a single chain) while
    n_rf_chains varies, so every extra chain contributes additional sensed
    rows per slot and the cascaded error improves accordingly.  The purely
    reflective baseline runs at the same pilot budget where identifiable;
    otherwise its column is flagged infeasible.
    """
    dims = dims or ChestDims()
    n_slots = int(n_slots) if n_slots is not None else dims.n_atoms
    if n_slots < 1:
        raise ValueError("n_slots must be a positive count")
    spec = _SweepSpec(seed=int(seed), nr_grid=tuple(int(n) for n in nr_grid),
                      snrs_db=tuple(float(s) for s in snr_db_list),
                      rho=float(rho), n_slots=n_slots, dims=dims)
    results = map_trials(partial(_sweep_trial, spec), n_trials, workers)
    casc = np.stack([r[0] for r in results]).mean(axis=0)
    base_trials = np.stack([r[1] for r in results])
    feasible = not np.any(np.isnan(base_trials))
    base = base_trials.mean(axis=0) if feasible else np.full(len(spec.snrs_db), np.nan)
    rows = []
    for i, n_rf in enumerate(spec.nr_grid):
        for s, snr_db in enumerate(spec.snrs_db):
            value = casc[i, s]
            row = {
                "n_rf": n_rf,
                "snr_db": snr_db,
                "nmse_cascaded": float(value),
                "nmse_cascaded_db": 10.0 * math.log10(value),
                "nmse_baseline": float(base[s]),
                "nmse_baseline_db": 10.0 * math.log10(base[s]) if feasible else float("nan"),
                "baseline_status": "ok" if feasible else "infeasible",
            }
            rows.append(row)
    return rows
