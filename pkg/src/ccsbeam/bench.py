"""Beam-alignment baselines, beamforming metrics, and campaign harness.

A campaign draws a seeded channel ensemble, runs every configured
method on every realization, and reduces the per-trial records to mean
RSRP and mean beamforming loss against the perfect-CSI conjugate
beamformer. All randomness is derived from (seed, method, trial), so a
campaign is reproducible regardless of execution order.
"""

from dataclasses import dataclass, field

import numpy as np

from . import ccs, gridops, maskopt
from .channel import Scenario, empirical_prior, generate_ensemble


def bf_gain(h, p_bf):
    """Beamforming gain |<H, P_BF>|^2 of a phase-shifter configuration."""
    return float(np.abs(np.vdot(np.asarray(p_bf), np.asarray(h))) ** 2)


def perfect_csi_bf(h):
    """Conjugate beamformer e^{j phase(H)}/N; zero entries get phase 0."""
    h = np.asarray(h)
    return np.exp(1j * np.angle(h)) / h.shape[0]


def conjugate_beamformer(x_hat):
    """Conjugate beamformer of the channel reconstructed from a beamspace estimate."""
    h_hat = gridops.dft2(np.asarray(x_hat))
    return np.exp(1j * np.angle(h_hat)) / h_hat.shape[0]


def dft_codeword(n, k):
    """Unit-modulus/N array codeword whose measurement reads beamspace entry k."""
    r, c = divmod(int(k), n)
    idx = np.arange(n)
    return np.exp(-2j * np.pi * (r * idx[:, None] + c * idx[None, :]) / n) / n


def uniform_base_matrix(n):
    """Quadratic-phase base matrix whose realized mask is exactly unimodular."""
    k = np.arange(n)
    if n % 2 == 0:
        chirp = np.exp(-1j * np.pi * k * k / n)
    else:
        chirp = np.exp(-1j * np.pi * k * (k + 1) / n)
    return np.outer(chirp, chirp) / n


def _beam_measurements(h, noise_var, rng):
    """One noisy scalar per DFT beam: the beamspace entry plus CN(0, sigma^2)."""
    x = gridops.vec(gridops.idft2(np.asarray(h)))
    if noise_var > 0:
        rng = np.random.default_rng(rng)
        x = x + np.sqrt(noise_var / 2.0) * (
            rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
    return x


def exhaustive_sweep(h, noise_var, rng=None):
    """Best beam after measuring the RSRP of all N^2 DFT beams."""
    return int(np.argmax(np.abs(_beam_measurements(h, noise_var, rng))))


def top_m_sweep(h, prior, m, noise_var, rng=None):
    """Best beam after sweeping only the m most probable directions.

    Ties in the prior resolve toward the lower beam index. With m = N^2
    this coincides with the exhaustive sweep for the same stream.
    """
    prior = np.asarray(prior, dtype=float)
    if not 1 <= m <= prior.size:
        raise ValueError(f"need 1 <= m <= {prior.size}, got {m}")
    order = np.argsort(-prior, kind="stable")[:m]
    y = _beam_measurements(h, noise_var, rng)
    return int(order[np.argmax(np.abs(y[order]))])


@dataclass(frozen=True)
class TrialRecord:
    """One method's outcome on one channel realization."""

    trial: int
    method: str
    m: int           # measurement count (0: none, n^2 for the full sweep)
    chosen: int      # flat beam index, -1 when the method picks no beam
    rsrp_db: float
    bf_gain: float
    bf_loss_db: float


METHODS = ("perfect-csi", "exhaustive", "top-m", "ccs-uniform", "ccs-prior")


@dataclass(frozen=True)
class CampaignConfig:
    """Offline experiment description: scenario, methods, sweep, seeds."""

    scenario: Scenario = field(default_factory=Scenario)
    methods: tuple = METHODS
    m_values: tuple = (20, 40, 100)
    trials: int = 500
    snr_db: float = 10.0
    seed: int = 0
    sparsity: int = 4
    gs_iters: int = 100
    floor: float = 0.01

    def __post_init__(self):
        if not self.methods:
            raise ValueError("need at least one method")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if self.trials < 1:
            raise ValueError("trial count must be positive")
        n_sq = self.scenario.n ** 2
        if any(not 1 <= m <= n_sq for m in self.m_values):
            raise ValueError(f"m values must lie in [1, {n_sq}]")


def _ccs_trial(real, p_base, mask, omega, noise_var, sparsity, rng):
    y = ccs.acquire(real.h, p_base, omega, noise_var, rng)
    x_hat = ccs.recover_beamspace(y, omega, mask, sparsity)
    return ccs.estimate_best_beam(x_hat), conjugate_beamformer(x_hat)


def run_campaign(cfg):
    """Run every configured method over a seeded ensemble.

    Returns (records, summary): the flat list of TrialRecord and the
    per-(method, m) aggregate rows, deterministic under a fixed config.
    """
    ensemble = generate_ensemble(cfg.scenario, cfg.trials, cfg.snr_db)
    noise_var = ensemble[0].noise_var
    prior = empirical_prior(ensemble)
    n = cfg.scenario.n

    bases = {}
    if "ccs-uniform" in cfg.methods:
        bases["ccs-uniform"] = uniform_base_matrix(n)
    if "ccs-prior" in cfg.methods:
        power = maskopt.optimize_mask_power(prior, noise_var, cfg.floor)
        target = gridops.unvec(np.sqrt(power), n)
        bases["ccs-prior"], _ = ccs.base_from_mask(
            target, iters=cfg.gs_iters, rng=np.random.default_rng([cfg.seed, 10**6]))
    masks = {name: maskopt.realized_mask(p) for name, p in bases.items()}

    records = []
    for trial, real in enumerate(ensemble):
        best_gain = bf_gain(real.h, perfect_csi_bf(real.h))

        def emit(method, m, chosen, p_bf):
            gain = bf_gain(real.h, p_bf)
            records.append(TrialRecord(
                trial=trial, method=method, m=m, chosen=chosen,
                rsrp_db=10.0 * np.log10(max(gain, 1e-300) / noise_var),
                bf_gain=gain,
                bf_loss_db=10.0 * np.log10(best_gain / max(gain, 1e-300))))

        for mi, method in enumerate(cfg.methods):
            stream = np.random.default_rng([cfg.seed, mi, trial])
            if method == "perfect-csi":
                emit(method, 0, -1, perfect_csi_bf(real.h))
            elif method == "exhaustive":
                k = exhaustive_sweep(real.h, noise_var, stream)
                emit(method, n * n, k, dft_codeword(n, k))
            elif method == "top-m":
                for m in cfg.m_values:
                    k = top_m_sweep(real.h, prior, m, noise_var, stream)
                    emit(method, m, k, dft_codeword(n, k))
            else:
                for m in cfg.m_values:
                    omega = ccs.sample_shift_set(n, m, stream)
                    chosen, p_bf = _ccs_trial(real, bases[method], masks[method],
                                              omega, noise_var, cfg.sparsity, stream)
                    emit(method, m, chosen, p_bf)
    return records, summarize(records)


def summarize(records):
    """Mean RSRP and BF loss per (method, measurement count)."""
    groups = {}
    for r in records:
        groups.setdefault((r.method, r.m), []).append(r)
    rows = []
    for (method, m), rs in sorted(groups.items()):
        rows.append({
            "method": method,
            "m": m,
            "trials": len(rs),
            "mean_rsrp_db": float(np.mean([r.rsrp_db for r in rs])),
            "mean_bf_loss_db": float(np.mean([r.bf_loss_db for r in rs])),
        })
    return rows
