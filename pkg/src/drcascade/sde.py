"""Monte Carlo integration of the delayed consensus dynamics.

Euler-Maruyama with a fixed ring buffer for the delayed state; additive
noise makes this weak order 1, which is enough to validate stationary
covariances. The delay is forced onto the step grid by shrinking dt, so
no interpolation bias enters. Every trajectory draws from its own
stream seeded by (seed, trajectory index), and pooled statistics are
assembled in trajectory order, so results are bitwise reproducible for
a fixed seed regardless of worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .covariance import NetworkParams, check_stability
from .errors import ConfigError, TooFewSamples
from .graphs import WeightedGraph, laplacian, spectrum_of

THREADS_ENV = "DRCASCADE_THREADS"

# steps of noise generated per vectorized stepping block
_CHUNK = 8192


@dataclass(frozen=True)
class SimConfig:
    """Integration grid, ensemble size, and sampling plan.

    dt may be shrunk internally so the delay is an exact multiple of the
    step. Aim for configs that pool at least ~1000 samples; covariance
    estimates below that are noise.
    """

    dt: float
    horizon: float
    burn_in: float
    trajectories: int
    seed: int
    thin: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.horizon <= 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon}")
        if not (0 <= self.burn_in < self.horizon):
            raise ConfigError(
                f"need 0 <= burn_in < horizon, got {self.burn_in} vs {self.horizon}"
            )
        if self.trajectories < 1:
            raise ConfigError("need at least one trajectory")
        if self.thin < 1:
            raise ConfigError("thin must be a positive step count")


@dataclass(frozen=True)
class EmpiricalStats:
    """Pooled sample mean and unbiased covariance of the observables."""

    mean: np.ndarray
    cov: np.ndarray
    samples: int
    stderr_scale: float


def worker_count(requested: int | None = None) -> int:
    """Resolve the worker cap: explicit argument, else DRCASCADE_THREADS, else 1."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, min(int(env), os.cpu_count() or 1))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer") from None
    return 1


def default_sim_config(
    spectrum, tau: float, trajectories: int = 64, seed: int = 0
) -> SimConfig:
    """Config sized from the network timescales.

    dt resolves both the delay and the fastest mode; burn-in covers
    twenty slowest-mode time constants; samples are spaced roughly one
    delay (or one fast-mode time) apart, about 2000 per trajectory.
    """
    candidates = [0.01 / spectrum.lambda_n, 1e-3]
    if tau > 0:
        candidates.append(tau / 20.0)
    dt = min(candidates)
    burn_in = 20.0 / spectrum.lambda_2
    spacing = tau if tau > 0 else 1.0 / spectrum.lambda_n
    thin = max(1, round(spacing / dt))
    horizon = burn_in + 2000 * thin * dt
    return SimConfig(
        dt=dt, horizon=horizon, burn_in=burn_in, trajectories=trajectories,
        seed=seed, thin=thin,
    )


def _run_batch(L, b, traj_ids, seed, dt, delay_steps, total_steps, burn_steps, thin):
    """Simulate one batch of trajectories; returns (batch, samples, n)."""
    n = L.shape[0]
    batch = len(traj_ids)
    gens = [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, int(k)))))
        for k in traj_ids
    ]
    x = np.zeros((batch, n))
    buf = np.zeros((delay_steps, batch, n)) if delay_steps else None
    n_samples = (total_steps - burn_steps) // thin
    out = np.zeros((batch, n_samples, n))
    noise_scale = b * math.sqrt(dt)
    sample_idx = 0
    step = 0
    while step < total_steps:
        block = min(_CHUNK, total_steps - step)
        if b > 0:
            noise = np.stack([g.standard_normal((block, n)) for g in gens], axis=1)
        else:
            noise = None
        for s in range(block):
            if delay_steps:
                slot = step % delay_steps
                drift = buf[slot] @ L
                buf[slot] = x
            else:
                drift = x @ L
            if noise is None:
                x = x - dt * drift
            else:
                x = x - dt * drift + noise_scale * noise[s]
            step += 1
            if step > burn_steps and (step - burn_steps) % thin == 0 and sample_idx < n_samples:
                out[:, sample_idx, :] = x - x.mean(axis=1, keepdims=True)
                sample_idx += 1
    return out


def simulate(
    g: WeightedGraph,
    params: NetworkParams,
    cfg: SimConfig,
    workers: int | None = None,
    dump_path: str | None = None,
) -> EmpiricalStats:
    """Integrate the network and pool observable statistics.

    The initial history is identically zero on [-tau, 0]. Observables
    are centered states collected every `thin` steps after the burn-in,
    pooled across all trajectories.
    """
    spectrum = spectrum_of(g)
    check_stability(spectrum, params.tau)
    L = laplacian(g)
    if params.tau > 0:
        delay_steps = max(1, math.ceil(params.tau / cfg.dt - 1e-12))
        dt = params.tau / delay_steps
    else:
        delay_steps, dt = 0, cfg.dt
    total_steps = math.ceil(cfg.horizon / dt - 1e-12)
    burn_steps = math.ceil(cfg.burn_in / dt - 1e-12)
    n_samples = (total_steps - burn_steps) // cfg.thin
    if n_samples < 1:
        raise ConfigError("horizon leaves no samples after burn-in and thinning")

    nw = min(worker_count(workers), cfg.trajectories)
    ids = np.arange(cfg.trajectories)
    batches = np.array_split(ids, nw)

    def run(batch_ids):
        return _run_batch(
            L, params.b, batch_ids, cfg.seed, dt, delay_steps,
            total_steps, burn_steps, cfg.thin,
        )

    if nw == 1:
        parts = [run(ids)]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(run, batches))
    samples = np.concatenate(parts, axis=0)  # (trajectories, n_samples, n)

    if dump_path is not None:
        times = (burn_steps + (np.arange(n_samples) + 1) * cfg.thin) * dt
        with open(dump_path, "w") as fh:
            fh.write("t," + ",".join(f"agent_{k}" for k in range(g.n)) + "\n")
            for traj in samples:
                for t, row in zip(times, traj):
                    fh.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")

    pooled = samples.reshape(-1, g.n)
    return empirical_covariance(pooled)


def empirical_covariance(samples: np.ndarray) -> EmpiricalStats:
    """Unbiased sample covariance of observable snapshots (rows)."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise TooFewSamples("need at least two sample rows")
    count = samples.shape[0]
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (count - 1)
    cov = 0.5 * (cov + cov.T)
    d = np.diag(cov)
    # Gaussian iid standard error of each covariance entry; a scale, not a CI
    stderr = np.sqrt((np.outer(d, d) + cov**2) / count)
    return EmpiricalStats(
        mean=mean, cov=cov, samples=count, stderr_scale=float(stderr.max())
    )
