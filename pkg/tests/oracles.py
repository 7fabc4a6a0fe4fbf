"""Slow, independent reference implementations used as test oracles.

Everything here is written the dumb way on purpose: explicit loops, explicit
pseudoinverses, finite differences.  None of it imports computational helpers
from the package under test, so agreement between the two routes checks the
maths, not the plumbing.
"""

import cmath
import math

import numpy as np


def element_positions_loops(n_h, n_v, spacing_m):
    """Centred-lattice coordinates, one append per element, row-major in ih."""
    pos = []
    for iv in range(n_v):
        for ih in range(n_h):
            x = (ih - (n_h - 1) / 2.0) * spacing_m
            y = (iv - (n_v - 1) / 2.0) * spacing_m
            pos.append((x, y, 0.0))
    return pos


def steering_vector_loops(n_h, n_v, spacing_m, wavelength_m, elevation_rad,
                          azimuth_rad):
    """Per-element plane-wave phases from scratch."""
    k = 2.0 * math.pi / wavelength_m
    ux = math.sin(elevation_rad) * math.cos(azimuth_rad)
    uy = math.sin(elevation_rad) * math.sin(azimuth_rad)
    uz = math.cos(elevation_rad)
    out = []
    for (x, y, z) in element_positions_loops(n_h, n_v, spacing_m):
        out.append(cmath.exp(1j * k * (x * ux + y * uy + z * uz)))
    return np.array(out)


def array_factor_loops(weights, steering):
    total = 0.0 + 0.0j
    for w, a in zip(weights, steering):
        total += w * a
    return total


def pathloss_by_hand(distance_m, wavelength_m):
    return (wavelength_m / (4.0 * math.pi * distance_m)) ** 2


def cascade_loops(H, G, rho, reflect_phase):
    """G diag(sqrt(rho) e^{j phi}) H with three explicit loops."""
    n_bs, n_atoms = G.shape
    _, n_users = H.shape
    out = np.zeros((n_bs, n_users), dtype=complex)
    for m in range(n_bs):
        for k in range(n_users):
            acc = 0.0 + 0.0j
            for n in range(n_atoms):
                coeff = math.sqrt(rho[n]) * cmath.exp(1j * reflect_phase[n])
                acc += G[m, n] * coeff * H[n, k]
            out[m, k] = acc
    return out


# ---------------------------------------------------------------------------
# Angle estimation oracles


def snapshot_mean_loops(n_h, n_v, spacing_m, wavelength_m, elevation_rad,
                        azimuth_rad, sensed_fraction, combiner, pilot,
                        amplitude):
    """Mean snapshot vector mu_t = amplitude * sqrt(f) * q_t^H a * s_t."""
    a = steering_vector_loops(n_h, n_v, spacing_m, wavelength_m,
                              elevation_rad, azimuth_rad)
    root_f = math.sqrt(sensed_fraction)
    mu = []
    for t in range(combiner.shape[0]):
        g_t = 0.0 + 0.0j
        for n in range(combiner.shape[1]):
            g_t += combiner[t, n].conjugate() * a[n]
        mu.append(amplitude * root_f * g_t * pilot[t])
    return np.array(mu)


def crlb_fd_fim(sc, step=1e-6):
    """Elevation variance bound from a finite-difference Fisher information.

    Treats the unknowns as (elevation, Re amplitude, Im amplitude), builds the
    3x3 Fisher information of the complex-Gaussian snapshot model from central
    differences of the mean vector, inverts it, and reads off the elevation
    entry.  Shares nothing with the closed form under test except the scenario
    object consumed as plain data.
    """
    arr = sc.array
    el0 = sc.true_direction.elevation_rad
    az = sc.true_direction.azimuth_rad
    alpha0 = complex(math.sqrt(sc.tx_power), 0.0)

    def mean(el, re_a, im_a):
        return (re_a + 1j * im_a) * snapshot_mean_loops(
            arr.n_h, arr.n_v, arr.spacing_m, arr.wavelength_m, el, az,
            sc.sensed_fraction, np.asarray(sc.combiner), np.asarray(sc.pilot),
            1.0)

    params = [el0, alpha0.real, alpha0.imag]
    jac_cols = []
    for i in range(3):
        hi = list(params)
        lo = list(params)
        hi[i] += step
        lo[i] -= step
        jac_cols.append((mean(*hi) - mean(*lo)) / (2.0 * step))
    jac = np.stack(jac_cols, axis=1)
    fim = (2.0 / sc.noise_var) * np.real(np.conj(jac.T) @ jac)
    cov = np.linalg.inv(fim)
    return float(cov[0, 0])


# ---------------------------------------------------------------------------
# Channel-estimation oracles (tiny systems, explicit pseudoinverse / hand math)


def estimate_sh_pinv(combiners, decorrelated_blocks):
    """Stacked least squares for the sensed channel via an explicit pinv."""
    stacked_q = np.vstack(combiners)
    stacked_y = np.vstack(decorrelated_blocks)
    return np.linalg.pinv(stacked_q) @ stacked_y


def estimate_g_normal_equations(regressors, observations):
    """min_G sum_t ||Y_t - G Z_t||_F^2 solved via explicit normal equations.

    G = (sum_t Y_t Z_t^H) (sum_t Z_t Z_t^H)^{-1}.
    """
    lhs = sum(y @ np.conj(z.T) for y, z in zip(observations, regressors))
    gram = sum(z @ np.conj(z.T) for z in regressors)
    return lhs @ np.linalg.inv(gram)


def baseline_two_unknowns(patterns, observations):
    """Cascaded LS for one user, one base antenna, two atoms, by hand.

    Solves observations[t] = a1 * patterns[t][0] + a2 * patterns[t][1] as a
    2x2 linear system from the first two slots (exact when noise free).
    """
    m = np.array([[patterns[0][0], patterns[0][1]],
                  [patterns[1][0], patterns[1][1]]], dtype=complex)
    rhs = np.array([observations[0], observations[1]], dtype=complex)
    return np.linalg.solve(m, rhs)
