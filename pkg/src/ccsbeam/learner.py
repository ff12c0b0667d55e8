"""Online estimation of the best-beam prior from compressive feedback.

Each channel realization yields one estimated best-beam index; a
superarm bandit treats that as simultaneously playing every beam
direction, so all play counts advance together and the per-beam mean
reward is the relative frequency the beam was reported best. Two
exploration styles are provided: normalized upper-confidence indices
("ucb") and an exploration bonus added to the mask amplitudes
("regmask"); "noexplore" and "oracle" are the reference variants.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import ccs, gridops, maskopt
from .bench import bf_gain, conjugate_beamformer, perfect_csi_bf
from .channel import empirical_prior as ensemble_prior


@dataclass(frozen=True)
class ExploreConfig:
    """Exploration strength c = sqrt(2 log(1/delta)) and unplayed-arm sentinel."""

    c: float = 0.1
    sentinel: float = 10000.0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("exploration coefficient must be >= 0")

    @classmethod
    def from_delta(cls, delta, sentinel=10000.0):
        if not 0 < delta < 1:
            raise ValueError("delta must be in (0, 1)")
        return cls(c=math.sqrt(2.0 * math.log(1.0 / delta)), sentinel=sentinel)


@dataclass(frozen=True)
class MeasurementSchedule:
    """Linearly decreasing measurement budget with a floor."""

    m0: int = 300
    dm: int = 20
    dt: int = 100
    m_min: int = 25

    def __post_init__(self):
        if min(self.m0, self.dm, self.dt, self.m_min) < 1:
            raise ValueError("schedule parameters must be positive integers")
        if self.m_min > self.m0:
            raise ValueError("m_min cannot exceed m0")


def schedule(t, sched):
    """Measurement count max(m0 - floor(t/dt)*dm, m_min) at step t."""
    if t < 0:
        raise ValueError("step must be >= 0")
    return max(sched.m0 - (t // sched.dt) * sched.dm, sched.m_min)


@dataclass(frozen=True)
class LearnerState:
    """Step counter, per-beam play counts, and accumulated one-hot rewards.

    Under the superarm convention all plays equal t, so the mean reward
    of beam k is reward_sum[k] / t: exactly the fraction of steps on
    which k was reported best.
    """

    t: int
    plays: np.ndarray       # integer play counts T_k
    reward_sum: np.ndarray  # accumulated rewards, one unit per step

    @classmethod
    def fresh(cls, n_beams):
        return cls(t=0, plays=np.zeros(n_beams, dtype=int),
                   reward_sum=np.zeros(n_beams))

    def mean_rewards(self):
        """Empirical per-beam mean; zero for never-played beams."""
        mu = np.zeros_like(self.reward_sum)
        played = self.plays > 0
        mu[played] = self.reward_sum[played] / self.plays[played]
        return mu


def record_reward(state, s):
    """Fold one best-beam report into the superarm state.

    The reported beam receives reward 1 and all others 0, every play
    count advances, and means update as running averages:
    mu_s <- (mu_s*T_s + 1)/(T_s + 1), mu_j <- mu_j*T_j/(T_j + 1).
    """
    if not 0 <= s < state.reward_sum.size:
        raise ValueError(f"beam index {s} out of range")
    reward_sum = state.reward_sum.copy()
    reward_sum[s] += 1.0
    return LearnerState(t=state.t + 1, plays=state.plays + 1,
                        reward_sum=reward_sum)


def ucb_index(state, cfg):
    """Upper confidence index: sentinel for unplayed beams, else mu + c/sqrt(T)."""
    mu = state.mean_rewards()
    idx = np.full(mu.shape, cfg.sentinel)
    played = state.plays > 0
    idx[played] = mu[played] + cfg.c / np.sqrt(state.plays[played])
    return idx


def ucb_prior(state, cfg):
    """Confidence indices normalized into a probability vector."""
    idx = ucb_index(state, cfg)
    return idx / idx.sum()


def reward_prior(state):
    """Mean rewards normalized into a prior; uniform before any feedback."""
    total = state.reward_sum.sum()
    if total == 0:
        return np.full(state.reward_sum.size, 1.0 / state.reward_sum.size)
    return state.reward_sum / total


def regularized_mask(state, cfg, noise_var, floor=0.01):
    """Mask amplitudes from the empirical prior plus a per-beam exploration bonus.

    Optimizes the power allocation for the normalized mean rewards, adds
    the sentinel (never played) or c/sqrt(T_k) to each amplitude, and
    renormalizes to total power N^2. Returns the flat amplitude vector.
    """
    p = reward_prior(state)
    amps = np.sqrt(maskopt.optimize_mask_power(p, noise_var, floor))
    bonus = np.full(amps.shape, cfg.sentinel)
    played = state.plays > 0
    bonus[played] = cfg.c / np.sqrt(state.plays[played])
    amps = amps + bonus
    n = math.isqrt(amps.size)
    return amps * (n / np.linalg.norm(amps))


def hellinger(p, q):
    """Hellinger distance sqrt(sum (sqrt(p) - sqrt(q))^2) / sqrt(2)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must have the same length")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("distributions must be nonnegative")
    return float(np.linalg.norm(np.sqrt(p) - np.sqrt(q)) / np.sqrt(2.0))


def prior_entropy(p):
    """Shannon entropy (nats), with 0*log(0) = 0."""
    p = np.asarray(p, dtype=float)
    pos = p > 0
    return float(-np.sum(p[pos] * np.log(p[pos])))


@dataclass(frozen=True)
class StepRecord:
    """Per-step trajectory entry of an online learning episode."""

    t: int
    m: int
    chosen: int
    hellinger: float
    bf_loss_db: float
    prior_entropy: float
    gs_residual: float


LEARNER_KINDS = ("ucb", "regmask", "noexplore", "oracle")


def _mask_amplitudes(kind, state, cfg, noise_var, floor):
    if kind == "ucb":
        prior = ucb_prior(state, cfg)
    elif kind == "noexplore":
        prior = reward_prior(state)
    elif kind == "regmask":
        return regularized_mask(state, cfg, noise_var, floor)
    else:
        raise ValueError(f"unknown learner kind {kind!r}")
    return np.sqrt(maskopt.optimize_mask_power(prior, noise_var, floor))


def run_episode(realizations, kind, cfg=None, sched=None, m=None, seed=0,
                sparsity=4, gs_iters=100, floor=0.01, snapshot_every=None):
    """Online learning episode over a pregenerated channel ensemble.

    Per step: build the mask for the current state, retrieve its phase,
    acquire M(t) compressive measurements of realization t, decode the
    best beam, and fold it back into the state. `kind` is one of
    "ucb", "regmask", "noexplore" (exploration-free empirical prior) or
    "oracle" (perfect feedback of the true best beam, no measurements).
    Either a MeasurementSchedule or a fixed measurement count `m` must be
    given for the compressive kinds.

    Returns (records, final_state, snapshots) where snapshots maps step
    -> flat mask amplitude vector on the requested cadence.
    """
    realizations = list(realizations)
    if not realizations:
        raise ValueError("need a nonempty ensemble")
    if kind not in LEARNER_KINDS:
        raise ValueError(f"unknown learner kind {kind!r}")
    if kind != "oracle" and (sched is None) == (m is None):
        raise ValueError("give exactly one of a schedule or a fixed m")
    cfg = cfg or ExploreConfig()
    n = realizations[0].h.shape[0]
    truth = ensemble_prior(realizations)

    state = LearnerState.fresh(n * n)
    records = []
    snapshots = {}
    for t, real in enumerate(realizations):
        step_rng = np.random.default_rng([seed, t])
        m_t = 0
        gs_res = 0.0
        if kind == "oracle":
            chosen = real.true_best
            loss_db = 0.0
        else:
            amps = _mask_amplitudes(kind, state, cfg, real.noise_var, floor)
            if snapshot_every and t % snapshot_every == 0:
                snapshots[t] = amps.copy()
            p_base, gs_res = ccs.base_from_mask(gridops.unvec(amps, n),
                                                iters=gs_iters, rng=step_rng)
            mask = maskopt.realized_mask(p_base)
            m_t = schedule(t, sched) if sched is not None else int(m)
            omega = ccs.sample_shift_set(n, m_t, step_rng)
            y = ccs.acquire(real.h, p_base, omega, real.noise_var, step_rng)
            x_hat = ccs.recover_beamspace(y, omega, mask, sparsity)
            chosen = ccs.estimate_best_beam(x_hat)
            gain = bf_gain(real.h, conjugate_beamformer(x_hat))
            best = bf_gain(real.h, perfect_csi_bf(real.h))
            loss_db = 10.0 * np.log10(best / max(gain, 1e-300))
        state = record_reward(state, chosen)
        est = reward_prior(state)
        records.append(StepRecord(
            t=t, m=m_t, chosen=chosen,
            hellinger=hellinger(est, truth),
            bf_loss_db=float(loss_db),
            prior_entropy=prior_entropy(est),
            gs_residual=float(gs_res)))
    return records, state, snapshots
