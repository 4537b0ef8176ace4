"""Independent numerical ground truth for the risk computations.

Three routes that share no code with the closed forms they check:

- adaptive quadrature of the conditional expectation, with the inner
  integral resolved analytically as a folded-normal mean so only a
  robust one-dimensional tail integral remains;
- Monte Carlo from the exact conditional factorization, with the
  truncated-normal draw parameterized through the complementary tail
  so it stays accurate at thresholds many deviations deep;
- dense grid maximization of the surrogate objective over the feasible
  box, as the reference for the worst-case pair optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, erfc, erfcinv

from .ambiguity import AmbiguitySpec
from .covariance import PairMarginal
from .errors import OutOfRange, QuadratureNonconvergence, TooFewSamples
from .risk import RHO_MAX, FailureEvent, approx_expectation

# sigma_i axis is processed in blocks to keep the dense grid in memory
_GRID_BLOCK = 32


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    max_depth: int = 200
    tail_cutoff: float = 12.0

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-4):
            raise OutOfRange(f"rel_tol must lie in (0, 1e-4], got {self.rel_tol}")
        if self.max_depth < 1:
            raise OutOfRange("max_depth must be positive")
        if self.tail_cutoff <= 0:
            raise OutOfRange("tail_cutoff must be positive")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float


def folded_normal_mean(mu: float, sigma: float) -> float:
    """E|Z| for Z ~ Normal(mu, sigma^2); reduces to |mu| as sigma -> 0."""
    if sigma == 0.0:
        return abs(mu)
    return sigma * math.sqrt(2.0 / math.pi) * math.exp(
        -mu * mu / (2.0 * sigma * sigma)
    ) + mu * math.erf(mu / (math.sqrt(2.0) * sigma))


def conditional_expectation_quadrature(
    pm: PairMarginal, ev: FailureEvent, cfg: QuadratureConfig | None = None
) -> float:
    """E[|y_j| | y_i in the failure tail] by 1-D adaptive quadrature.

    The joint density is centrally symmetric, so the two-sided tail is
    twice the upper-tail integral; given y_i, the conditional law of
    y_j is Normal(rho (sigma_j/sigma_i) y_i, (1-rho^2) sigma_j^2) and
    its folded mean is analytic, leaving one tail integral in y_i.
    """
    cfg = cfg or QuadratureConfig()
    z0 = ev.delta_bar / pm.sigma_i
    denom = float(erfc(z0 / math.sqrt(2.0)))
    if denom <= 0.0:
        raise QuadratureNonconvergence(
            f"tail probability underflows at delta_bar/sigma_i = {z0:.3g}"
        )
    slope = pm.rho * pm.sigma_j
    spread = pm.rho_prime * pm.sigma_j

    def integrand(z: float) -> float:
        return folded_normal_mean(slope * z, spread) * math.exp(-0.5 * z * z)

    result = quad(
        integrand,
        z0,
        z0 + cfg.tail_cutoff,
        epsabs=0.0,
        epsrel=cfg.rel_tol,
        limit=cfg.max_depth,
        full_output=1,
    )
    if len(result) > 3:
        raise QuadratureNonconvergence(str(result[3]))
    value, abserr = result[0], result[1]
    if value > 0 and abserr > 10.0 * cfg.rel_tol * value:
        raise QuadratureNonconvergence(
            f"estimated error {abserr:.3g} exceeds tolerance at value {value:.6g}"
        )
    return 2.0 * value / (math.sqrt(2.0 * math.pi) * denom)


def conditional_expectation_mc(
    pm: PairMarginal, ev: FailureEvent, n_samples: int, seed: int
) -> McEstimate:
    """Monte Carlo estimate of the conditional expectation with its stderr.

    y_i is drawn from the two-sided truncated normal by inverse CDF on
    the complementary tail, then y_j from its conditional normal. Fixed
    seed gives a bitwise-reproducible estimate.
    """
    if n_samples < 10_000:
        raise TooFewSamples(f"need at least 1e4 samples, got {n_samples}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    ds = ev.delta_bar / (math.sqrt(2.0) * pm.sigma_i)
    tail = float(erfc(ds))
    u = 1.0 - rng.random(n_samples)  # in (0, 1]: keeps the inverse CDF finite
    z = math.sqrt(2.0) * erfcinv(u * tail)
    signs = rng.integers(0, 2, n_samples) * 2 - 1
    yi = signs * pm.sigma_i * z
    xi = rng.standard_normal(n_samples)
    yj = pm.rho * (pm.sigma_j / pm.sigma_i) * yi + pm.rho_prime * pm.sigma_j * xi
    mag = np.abs(yj)
    return McEstimate(
        estimate=float(mag.mean()),
        stderr=float(mag.std(ddof=1) / math.sqrt(n_samples)),
    )


def brute_force_dr_risk(
    pm0: PairMarginal, spec: AmbiguitySpec, ev: FailureEvent, grid_points: int
) -> float:
    """Dense-grid reference for the worst-case pair risk.

    Evaluates the surrogate objective on grid_points per axis over the
    same feasible box the optimizer searches; the objective is even in
    rho, so the grid covers [0, RHO_MAX].
    """
    if grid_points < 50:
        raise OutOfRange(f"need at least 50 grid points per axis, got {grid_points}")
    db = ev.delta_bar
    if spec.degenerate:
        best = float(approx_expectation(pm0.sigma_i, pm0.sigma_j, pm0.rho, db))
        return max(0.0, best - ev.c)
    if spec.family == "diffusion":
        theta = np.linspace(-spec.alpha, spec.alpha, grid_points)
        s = np.sqrt(1.0 + theta)
        vals = approx_expectation(s * pm0.sigma_i, s * pm0.sigma_j, pm0.rho, db)
        return max(0.0, float(np.max(vals)) - ev.c)
    lo = math.sqrt(1.0 - spec.eps_minus)
    hi = math.sqrt(1.0 + spec.eps_plus)
    si = np.linspace(lo * pm0.sigma_i, hi * pm0.sigma_i, grid_points)
    sj = np.linspace(lo * pm0.sigma_j, hi * pm0.sigma_j, grid_points)
    rho = np.linspace(0.0, RHO_MAX, grid_points)
    best = -math.inf
    for start in range(0, grid_points, _GRID_BLOCK):
        block = si[start : start + _GRID_BLOCK]
        vals = approx_expectation(
            block[:, None, None], sj[None, :, None], rho[None, None, :], db
        )
        best = max(best, float(np.max(vals)))
    return max(0.0, best - ev.c)
