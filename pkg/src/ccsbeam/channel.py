"""Synthetic narrowband MISO channels for a wall-mounted square UPA.

Geometry of the default scenario: a street canyon with two straight
lanes. The array hangs on the near canyon wall at the origin, x runs
along the street, y across it, z up. Vehicles drive at y > 0, so every
departure direction lies in the front half-space and the azimuth stays
in (0, pi). Besides the (possibly blocked) line-of-sight path, the far
wall and the road surface contribute single-bounce reflections via the
image method, each attenuated by a configurable per-bounce loss.

Channel matrices follow the path-sum model
    H = sum_l  alpha_l * exp(j beta_l) * outer(a(cos th_l), a(sin th_l cos ph_l))
with a(.) the half-wavelength steering vector; rows are elevation,
columns azimuth.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import gridops


@dataclass(frozen=True)
class PathParams:
    """One propagation path: linear amplitude, phase, and departure angles."""

    gain: float       # >= 0, linear amplitude
    phase: float      # radians in [0, 2*pi)
    elevation: float  # radians in (0, pi), measured from zenith
    azimuth: float    # radians in (0, pi), measured from the street axis


@dataclass(frozen=True)
class Scenario:
    """Parametric two-lane street-canyon geometry plus RNG seed."""

    n: int = 32                      # UPA side
    max_paths: int = 3
    bs_height: float = 5.0           # m, array mounting height
    rx_height: float = 1.5           # m, receiver (vehicle roof) height
    road_offset: float = 3.0         # m, wall-to-near-lane-edge distance
    lane_width: float = 3.5          # m
    canyon_half_width: float = 10.0  # m, far wall sits at twice this
    coverage_length: float = 100.0   # m, served street segment
    reflection_loss_db: float = 6.0  # dB per bounce
    blockage_prob: float = 0.2       # LOS Bernoulli blockage
    vehicle_law: str = "uniform"     # "uniform" or "erlang" along-street law
    erlang_shape: int = 3
    erlang_scale: float = 10.0       # m
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("UPA side must be >= 2")
        if self.max_paths < 1:
            raise ValueError("need at least one path")
        for name in ("bs_height", "rx_height", "road_offset", "lane_width",
                     "canyon_half_width", "coverage_length", "erlang_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.blockage_prob <= 1.0:
            raise ValueError("blockage probability must be in [0, 1]")
        if self.road_offset + 2 * self.lane_width >= 2 * self.canyon_half_width:
            raise ValueError("road does not fit inside the canyon")
        if self.vehicle_law not in ("uniform", "erlang"):
            raise ValueError(f"unknown vehicle law {self.vehicle_law!r}")


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw with its beamspace and calibrated noise level."""

    h: np.ndarray        # (n, n) antenna-domain channel
    x: np.ndarray        # (n, n) beamspace, idft2(h)
    true_best: int       # flat index of the strongest beamspace entry
    noise_var: float


def reference_distance(scenario):
    """Wall-to-first-lane-center distance used to normalize path amplitudes."""
    dy = scenario.road_offset + 0.5 * scenario.lane_width
    dz = scenario.bs_height - scenario.rx_height
    return math.hypot(dy, dz)


def _path_from_point(scenario, point, bounce_gain, rng):
    """Path parameters for a (possibly mirrored) receiver point."""
    dx, dy, dz = point[0], point[1], point[2] - scenario.bs_height
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    if dist < 1e-9:
        return None
    gain = bounce_gain * reference_distance(scenario) / dist
    theta = math.acos(dz / dist)
    phi = math.atan2(dy, dx)
    beta = rng.uniform(0.0, 2.0 * math.pi)
    return PathParams(gain=gain, phase=beta, elevation=theta, azimuth=phi)


def sample_paths(scenario, rng):
    """Draw one receiver placement and its LOS/reflected departure paths.

    Returns 1..max_paths PathParams sorted by descending amplitude. The
    LOS path is dropped with the scenario blockage probability; single
    bounces off the far wall and the road always survive (attenuated), so
    at least one path remains.
    """
    far_wall = 2.0 * scenario.canyon_half_width
    bounce = 10.0 ** (-scenario.reflection_loss_db / 20.0)
    for _ in range(100):
        lane = int(rng.integers(2))
        y = scenario.road_offset + (lane + 0.5) * scenario.lane_width
        if scenario.vehicle_law == "erlang":
            gap = rng.gamma(scenario.erlang_shape, scenario.erlang_scale)
            x = gap % scenario.coverage_length - scenario.coverage_length / 2.0
        else:
            x = rng.uniform(-scenario.coverage_length / 2.0,
                            scenario.coverage_length / 2.0)
        blocked = rng.random() < scenario.blockage_prob

        candidates = []
        if not blocked:
            candidates.append(((x, y, scenario.rx_height), 1.0))
        # Image method: mirror across the far wall, then across the road.
        candidates.append(((x, 2.0 * far_wall - y, scenario.rx_height), bounce))
        candidates.append(((x, y, -scenario.rx_height), bounce))

        paths = []
        for point, g in candidates:
            path = _path_from_point(scenario, point, g, rng)
            if path is not None:
                paths.append(path)
        if paths:
            paths.sort(key=lambda p: -p.gain)
            return paths[: scenario.max_paths]
    raise RuntimeError("could not draw a non-degenerate receiver placement")


def assemble_channel(paths, n):
    """Sum of rank-one path contributions on an n x n UPA."""
    if not paths:
        raise ValueError("need at least one path")
    h = np.zeros((n, n), dtype=complex)
    for p in paths:
        row = gridops.array_response(n, math.cos(p.elevation))
        col = gridops.array_response(n, math.sin(p.elevation) * math.cos(p.azimuth))
        h += p.gain * np.exp(1j * p.phase) * np.outer(row, col)
    return h


def beamspace(h):
    """Beamspace transform of an antenna-domain channel (inverse 2D-DFT)."""
    return gridops.idft2(h)


def best_beam(x):
    """Flat index of the strongest beamspace coefficient, lowest index on ties."""
    return int(np.argmax(np.abs(gridops.vec(x))))


def calibrate_noise(channels, target_snr_db):
    """Noise variance making the mean per-antenna channel power hit an SNR.

    sigma^2 = mean(||H||_F^2 / N^2) / 10^(snr_db / 10)
    """
    channels = list(channels)
    if not channels:
        raise ValueError("need a nonempty channel ensemble")
    mean_power = float(np.mean([np.linalg.norm(h) ** 2 / h.size for h in channels]))
    return mean_power / 10.0 ** (target_snr_db / 10.0)


def wideband_aggregate(taps):
    """Entrywise sum of per-tap channel matrices."""
    taps = list(taps)
    if not taps:
        raise ValueError("need at least one tap")
    out = np.zeros_like(np.asarray(taps[0], dtype=complex))
    for t in taps:
        t = np.asarray(t)
        if t.shape != out.shape:
            raise ValueError("tap dimensions disagree")
        out = out + t
    return out


def realization_rng(seed, index):
    """Independent per-realization stream; safe to draw in any order."""
    return np.random.default_rng([seed, index])


def draw_channel(scenario, index):
    """Channel matrix of realization `index` under the scenario seed."""
    rng = realization_rng(scenario.seed, index)
    return assemble_channel(sample_paths(scenario, rng), scenario.n)


def generate_ensemble(scenario, count, target_snr_db=10.0):
    """Seeded list of ChannelRealization with ensemble-calibrated noise."""
    if count < 1:
        raise ValueError("need at least one realization")
    hs = [draw_channel(scenario, i) for i in range(count)]
    noise_var = calibrate_noise(hs, target_snr_db)
    out = []
    for h in hs:
        x = beamspace(h)
        out.append(ChannelRealization(h=h, x=x, true_best=best_beam(x),
                                      noise_var=noise_var))
    return out


def empirical_prior(realizations):
    """Relative frequency of each beam index being the true best."""
    realizations = list(realizations)
    if not realizations:
        raise ValueError("need a nonempty ensemble")
    n_sq = realizations[0].x.size
    counts = np.bincount([r.true_best for r in realizations], minlength=n_sq)
    return counts / len(realizations)
