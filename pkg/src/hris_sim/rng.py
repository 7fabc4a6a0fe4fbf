"""Counter-based random stream derivation.

Every Monte Carlo trial draws from its own generator whose Philox key encodes
``(seed, experiment id, trial index, substream tag)``.  Streams therefore do
not depend on scheduling order, which is what makes results byte-identical
regardless of how many worker processes participate in a run.
"""

from __future__ import annotations

import numpy as np

# Experiment identifiers baked into stream keys.  Never renumber entries:
# doing so silently changes every random draw of the affected experiment.
EXPERIMENT_IDS = {
    "aoa_rmse": 1,
    "chest_tradeoff": 2,
    "rf_chain_sweep": 3,
    "beampattern": 4,
    "unit_test": 99,
}

# Substream tags, one per independent randomness consumer within a trial.
TAG_CHANNEL = 0
TAG_NOISE_HRIS = 1
TAG_NOISE_BS = 2
TAG_TRUTH = 3
TAG_PHASES = 4
TAG_NOISE_BASELINE = 5

_MASK32 = 0xFFFFFFFF
_MASK16 = 0xFFFF


def substream(seed: int, experiment: str | int, trial: int, tag: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, experiment, trial, tag) tuple.

    The 128-bit Philox key is ``[seed, experiment<<48 | tag<<32 | trial]``,
    so distinct tuples map to distinct, statistically independent streams.
    """
    exp_id = EXPERIMENT_IDS[experiment] if isinstance(experiment, str) else int(experiment)
    if not 0 <= trial <= _MASK32:
        raise ValueError(f"trial index {trial} outside the 32-bit key field")
    if not 0 <= tag <= _MASK16:
        raise ValueError(f"substream tag {tag} outside the 16-bit key field")
    if not 0 <= exp_id <= _MASK16:
        raise ValueError(f"experiment id {exp_id} outside the 16-bit key field")
    key = np.array(
        [np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
         np.uint64((exp_id << 48) | (tag << 32) | trial)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def complex_normal(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Draw circularly-symmetric complex Gaussians with per-entry variance ``var``.

    Real and imaginary parts are independent N(0, var/2) so that
    E[|x|^2] = var exactly.
    """
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
