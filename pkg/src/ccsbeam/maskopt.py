"""Sensing-mask design for a known best-beam prior.

The mask magnitude is a per-direction power allocation over the N^2
DFT beam directions, constrained to a total budget of N^2. The power
profile is chosen by a water-filling style KKT solve that maximizes a
Jensen lower bound on the beam alignment probability, and the phase
that makes the mask realizable by a unit-modulus base matrix is
recovered with Gerchberg-Saxton alternating projections.

Vectors (priors, powers) are flat length-N^2 arrays in the package-wide
row-major order; Gerchberg-Saxton works on (N, N) grids.
"""

import numpy as np

from . import gridops


def _check_prior(prior):
    p = np.asarray(prior, dtype=float)
    if p.ndim != 1:
        raise ValueError("prior must be a flat vector")
    if np.any(p < 0):
        raise ValueError("prior entries must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-6:
        raise ValueError(f"prior must sum to 1, got {p.sum()}")
    return p / p.sum()


def lemma1_prob(xi_sq):
    """P(|1 + x|^2 >= |y|^2) for iid circular complex Gaussians of variance xi_sq.

    Equals 1 - exp(-1/(2*xi_sq))/2; tends to 1/2 as the variance grows and
    to 1 as it vanishes.
    """
    if xi_sq <= 0:
        raise ValueError("variance must be positive")
    return 1.0 - 0.5 * np.exp(-1.0 / (2.0 * xi_sq))


def success_prob(power, prior, noise_var):
    """Alignment-probability model sum_k p_k (1 - exp(-s_k/(2 sigma^2))/2)^(K-1).

    `power` holds the per-direction mask powers s_k = |z_k|^2. The model
    treats the K-1 pairwise comparisons against the winning bin as
    independent, so it is an approximation of the physical argmax success
    rate, not an exact probability.
    """
    s = np.asarray(power, dtype=float)
    p = _check_prior(prior)
    if s.shape != p.shape:
        raise ValueError("power and prior must have the same length")
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    k = s.size
    pairwise = 1.0 - 0.5 * np.exp(-s / (2.0 * noise_var))
    return float(np.sum(p * pairwise ** (k - 1)))


def lower_bound(power, prior, noise_var):
    """Jensen lower bound on log success_prob: (K-1) sum_k p_k log(...)."""
    s = np.asarray(power, dtype=float)
    p = _check_prior(prior)
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    k = s.size
    pairwise = 1.0 - 0.5 * np.exp(-s / (2.0 * noise_var))
    return float((k - 1) * np.sum(p * np.log(pairwise)))


def _power_at(lam, prior, noise_var, floor):
    """Per-direction maximizer of p_k*g(s_k) - lam*s_k above the floor.

    g(s) = log(1 - exp(-s/(2 sigma^2))/2) has g'(s) = u/(2 sigma^2 (2-u))
    with u = exp(-s/(2 sigma^2)), which inverts in closed form.
    """
    s = np.full(prior.shape, float(floor))
    pos = prior > 0
    tau = lam / prior[pos]
    u = 4.0 * noise_var * tau / (1.0 + 2.0 * noise_var * tau)
    with np.errstate(divide="ignore"):
        unclamped = -2.0 * noise_var * np.log(u)
    s[pos] = np.maximum(unclamped, floor)
    return s


def optimize_mask_power(prior, noise_var, floor=0.01):
    """Allocate the N^2 power budget across beam directions for a prior.

    Maximizes sum_k p_k log(1 - exp(-s_k/(2 sigma^2))/2) subject to
    sum_k s_k = N^2 and s_k >= floor, via bisection on the KKT multiplier
    (the inner inversion of g' is closed-form). The floor keeps every
    direction observable so sparse recovery stays well posed.
    """
    p = _check_prior(prior)
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    if floor < 0:
        raise ValueError("floor must be nonnegative")
    budget = float(p.size)
    if floor * p.size > budget:
        raise ValueError(f"floor {floor} infeasible for budget {budget}")

    def total(lam):
        return _power_at(lam, p, noise_var, floor).sum()

    # g'(floor) bounds the multiplier at which every direction is floored.
    u_floor = np.exp(-floor / (2.0 * noise_var))
    lam_hi = p.max() * u_floor / (2.0 * noise_var * (2.0 - u_floor)) * (1.0 + 1e-9)
    lam_lo = lam_hi
    while total(lam_lo) < budget:
        lam_lo /= 2.0
        if lam_lo < 1e-300:
            break
    for _ in range(200):
        mid = 0.5 * (lam_lo + lam_hi)
        if total(mid) >= budget:
            lam_lo = mid
        else:
            lam_hi = mid
        if lam_hi - lam_lo <= 1e-10 * lam_hi:
            break
    s = _power_at(lam_lo, p, noise_var, floor)
    # Spread the residual budget over the unfloored directions.
    free = s > floor
    if np.any(free):
        s[free] += (budget - s.sum()) / free.sum()
    else:
        s += (budget - s.sum()) / s.size
    return s


def gerchberg_saxton(target_mag, iters=100, rng=None):
    """Phase retrieval for a unit-modulus base matrix realizing a mask magnitude.

    Alternates magnitude projections between the mask domain (target
    magnitude, Frobenius norm N) and the base-matrix domain (entrywise
    1/N), starting from uniform random mask phases. Returns the base
    matrix of the best iterate together with the per-iteration residuals
    || |realized mask| - target ||_F; the residual sequence is
    non-increasing (alternating projections between magnitude sets).
    """
    target = np.asarray(target_mag, dtype=float)
    if target.ndim != 2 or target.shape[0] != target.shape[1]:
        raise ValueError(f"expected a square magnitude grid, got {target.shape}")
    if np.any(target < 0):
        raise ValueError("target magnitude must be nonnegative")
    n = target.shape[0]
    norm = np.linalg.norm(target)
    if abs(norm - n) > 1e-6 * n:
        raise ValueError(f"target magnitude must have Frobenius norm {n}, got {norm}")
    if iters < 1:
        raise ValueError("need at least one iteration")

    rng = np.random.default_rng(rng)
    psi = rng.uniform(-np.pi, np.pi, size=(n, n))
    residuals = np.empty(iters)
    best_q = None
    best_res = np.inf
    for i in range(iters):
        # Mask -> base domain: Z = N * idft2(Q) inverts to Q = dft2(Z)/N.
        q = gridops.dft2(target * np.exp(1j * psi)) / n
        q = np.exp(1j * np.angle(q)) / n
        realized = n * gridops.idft2(q)
        residuals[i] = np.linalg.norm(np.abs(realized) - target)
        if residuals[i] < best_res:
            best_res = residuals[i]
            best_q = q
        psi = np.angle(realized)
    # Q plays the role of the flipped-conjugate of the base matrix.
    return gridops.flip_conjugate(best_q), residuals


def realized_mask(p):
    """Mask actually produced by a base matrix: N * idft2(flip_conjugate(P))."""
    p = np.asarray(p)
    return p.shape[0] * gridops.idft2(gridops.flip_conjugate(p))
