"""Convolutional compressive acquisition and sparse beamspace recovery.

Measurements are projections of the channel onto circulant shifts of a
unit-modulus base matrix P. Collecting every shift is the 2D circular
convolution H (*) flip_conjugate(P); an acquisition keeps the entries at
M sampled shift coordinates. In the beamspace domain the model becomes a
subsampled 2D-DFT of X .* Z, where the mask Z = N*idft2(P_FC) weights
each beam direction, so recovery is matching pursuit over mask-scaled
partial-DFT atoms.

Shift sets are (M, 2) integer arrays of (row, col) coordinates; masks
passed to the recovery are the complex realized mask grids.
"""

import numpy as np

from . import gridops
from .maskopt import gerchberg_saxton, realized_mask


def full_shift_set(n):
    """All n^2 shift coordinates in flat row-major order."""
    r, c = np.divmod(np.arange(n * n), n)
    return np.stack([r, c], axis=1)


def sample_shift_set(n, m, rng):
    """M distinct shift coordinates drawn uniformly without replacement."""
    if not 1 <= m <= n * n:
        raise ValueError(f"need 1 <= m <= {n * n}, got {m}")
    rng = np.random.default_rng(rng)
    flat = rng.choice(n * n, size=m, replace=False)
    r, c = np.divmod(flat, n)
    return np.stack([r, c], axis=1)


def project_shifted(h, p, shift):
    """Single physical measurement <H, circ_shift(P, shift)>."""
    return complex(np.vdot(gridops.circ_shift(p, shift), h))


def _complex_noise(m, noise_var, rng):
    scale = np.sqrt(noise_var / 2.0)
    return scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m))


def acquire(h, p, omega, noise_var, rng=None):
    """Noisy channel measurements at the sampled circulant shifts.

    Computed through the convolution route; equals the per-shift inner
    products <H, circ_shift(P, omega[m])> up to float error.
    """
    h = np.asarray(h)
    p = np.asarray(p)
    if h.shape != p.shape:
        raise ValueError(f"side mismatch: {h.shape} vs {p.shape}")
    omega = np.asarray(omega, dtype=int)
    if omega.ndim != 2 or omega.shape[1] != 2:
        raise ValueError("shift set must be an (M, 2) coordinate array")
    g = gridops.circ_conv2(h, gridops.flip_conjugate(p))
    y = g[omega[:, 0], omega[:, 1]]
    if noise_var > 0:
        rng = np.random.default_rng(rng)
        y = y + _complex_noise(omega.shape[0], noise_var, rng)
    return y


def _dictionary(omega, mask_flat, n):
    """Mask-scaled partial-DFT atoms: A[m, q] = z_q/N * e^{-2pi j(r_m k + c_m l)/N}."""
    table = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    k, l = np.divmod(np.arange(n * n), n)
    a = table[omega[:, 0]][:, k] * table[omega[:, 1]][:, l]
    return a * (mask_flat / n)


def recover_beamspace(y, omega, mask, sparsity=4):
    """Greedy sparse beamspace estimate from subsampled measurements.

    Orthogonal matching pursuit over the model y = A x + v, where column
    k of A is the Omega-subsampled 2D-DFT atom for beam direction k
    scaled by the mask entry z_k. Folding the mask into the atoms means
    the returned grid estimates X itself, so the best beam can be read
    off without dividing by small mask entries. Selection uses the raw
    residual correlations, keeping the mask's power allocation as a
    prior weight (normalizing the scaled atoms away would let weakly
    sensed directions absorb noise with 1/|z_k|-amplified coefficients).
    At most `sparsity` entries are nonzero and the residual is
    non-increasing per iteration.
    """
    y = np.asarray(y, dtype=complex).reshape(-1)
    omega = np.asarray(omega, dtype=int)
    mask = np.asarray(mask)
    n = mask.shape[0]
    z = gridops.vec(mask).astype(complex)
    m = y.size
    if omega.shape != (m, 2):
        raise ValueError("shift set and measurement length disagree")
    if sparsity < 1:
        raise ValueError("sparsity must be >= 1")
    if sparsity > m:
        raise ValueError(f"sparsity {sparsity} exceeds measurement count {m}")
    if np.any(z == 0):
        raise ValueError("mask must be nonzero everywhere")

    x_hat = np.zeros(n * n, dtype=complex)
    if not np.any(y):
        return gridops.unvec(x_hat, n)

    a = _dictionary(omega, z, n)
    support = []
    coef = np.empty(0)
    residual = y
    for _ in range(sparsity):
        scores = np.abs(a.conj().T @ residual)
        scores[support] = -1.0
        support.append(int(np.argmax(scores)))
        coef, *_ = np.linalg.lstsq(a[:, support], y, rcond=None)
        residual = y - a[:, support] @ coef
        if np.linalg.norm(residual) <= 1e-12 * np.linalg.norm(y):
            break
    x_hat[support] = coef
    return gridops.unvec(x_hat, n)


def estimate_best_beam(x_hat):
    """Flat index of the largest |entry| of the estimate, lowest index on ties."""
    flat = np.abs(gridops.vec(x_hat))
    if not np.any(flat):
        raise ValueError("beamspace estimate is identically zero")
    return int(np.argmax(flat))


def base_from_mask(target_mag, iters=100, rng=None):
    """Unit-modulus base matrix whose realized mask magnitude approximates a target.

    Runs Gerchberg-Saxton phase retrieval and returns (P, final_residual).
    The realized mask of the result is realized_mask(P).
    """
    p, residuals = gerchberg_saxton(target_mag, iters=iters, rng=rng)
    return p, float(residuals.min())
