"""Steady-state covariance of consensus observables under delayed noise.

For the network dx = -L x(t - tau) dt + b dW with observables
y = M x (M the centering matrix), the stationary observables are
zero-mean Gaussian with covariance

    Sigma = sum_{k >= 2} psi_k q_k q_k^T,
    psi_k = b^2 cos(lambda_k tau) / (2 lambda_k (1 - sin(lambda_k tau))),

valid whenever tau < pi / (2 lambda_n). At tau = 0 this reduces to
psi_k = b^2 / (2 lambda_k), i.e. Sigma = (b^2 / 2) L^+.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningWarning, DegenerateMarginal, UnstableDelay
from .graphs import Spectrum

# correlations with 1 - |rho| below this are treated as numerically broken
DEGENERATE_RHO_TOL = 1e-12

# stability margins below this fraction of pi/(2 lambda_n) are flagged
MARGIN_WARN_FRACTION = 1e-3


@dataclass(frozen=True)
class NetworkParams:
    """Diffusion coefficient b and uniform time delay tau.

    b = 0 is the noiseless network with identically zero covariance;
    risk computations need b > 0, but the simulator accepts b = 0.
    """

    b: float
    tau: float

    def __post_init__(self):
        if self.b < 0:
            raise ValueError(f"diffusion coefficient must be nonnegative, got {self.b}")
        if self.tau < 0:
            raise ValueError(f"time delay must be nonnegative, got {self.tau}")


@dataclass(frozen=True)
class SteadyCovariance:
    """Stationary observable covariance and its modal variances.

    sigma is the n x n covariance matrix; psi holds the variances along
    the Laplacian modes, psi[0] == 0 for the unobservable average mode.
    """

    sigma: np.ndarray
    psi: np.ndarray

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    def std(self, i: int) -> float:
        return math.sqrt(float(self.sigma[i, i]))

    @property
    def psi_min(self) -> float:
        """Smallest nonzero modal variance."""
        return float(self.psi[1:].min())

    @property
    def psi_max(self) -> float:
        """Largest modal variance."""
        return float(self.psi[1:].max())


@dataclass(frozen=True)
class PairMarginal:
    """Marginal statistics of one observable pair (sigma_i, sigma_j, rho)."""

    sigma_i: float
    sigma_j: float
    rho: float

    @property
    def rho_prime(self) -> float:
        return math.sqrt(1.0 - self.rho * self.rho)


def check_stability(spectrum: Spectrum, tau: float) -> float:
    """Return the stability margin pi/(2 lambda_n) - tau.

    Raises UnstableDelay when the margin is not strictly positive; every
    covariance computation calls this gate first. A ConditioningWarning
    is emitted when the margin is positive but tiny, because modal
    variances diverge at the boundary.
    """
    bound = math.pi / (2.0 * spectrum.lambda_n)
    margin = bound - tau
    if margin <= 0:
        raise UnstableDelay(
            f"tau = {tau} >= pi/(2 lambda_n) = {bound:.6g}; dynamics unstable"
        )
    if margin < MARGIN_WARN_FRACTION * bound:
        warnings.warn(
            f"stability margin {margin:.3e} below {MARGIN_WARN_FRACTION:.0e} of "
            f"pi/(2 lambda_n); variances are near-divergent",
            ConditioningWarning,
            stacklevel=2,
        )
    return margin


def modal_variance(lam: float, tau: float, b: float) -> float:
    """Stationary variance of one observable mode.

    tau = 0 takes the analytic limit b^2/(2 lambda) directly, which
    makes the zero-delay pseudoinverse identity exact.
    """
    if lam <= 0:
        raise ValueError(f"mode eigenvalue must be positive, got {lam}")
    if tau == 0:
        return b * b / (2.0 * lam)
    x = lam * tau
    if x >= math.pi / 2:
        raise UnstableDelay(f"lambda*tau = {x:.6g} >= pi/2")
    return b * b * math.cos(x) / (2.0 * lam * (1.0 - math.sin(x)))


def steady_covariance(spectrum: Spectrum, params: NetworkParams) -> SteadyCovariance:
    """Assemble the stationary observable covariance from modal variances.

    The centering matrix is applied implicitly by zeroing the constant
    mode, so the kernel of the result is exactly span{1}.
    """
    check_stability(spectrum, params.tau)
    lam = spectrum.eigenvalues
    psi = np.zeros_like(lam)
    for k in range(1, lam.shape[0]):
        psi[k] = modal_variance(float(lam[k]), params.tau, params.b)
    Q = spectrum.eigenvectors
    sigma = (Q * psi) @ Q.T
    sigma = 0.5 * (sigma + sigma.T)
    sigma.flags.writeable = False
    psi.flags.writeable = False
    return SteadyCovariance(sigma=sigma, psi=psi)


def pair_marginal(cov: SteadyCovariance, i: int, j: int) -> PairMarginal:
    """Extract (sigma_i, sigma_j, rho) for an observable pair i != j.

    |rho| < 1 is guaranteed for a valid covariance because every
    principal submatrix of Sigma is positive definite; a correlation at
    +-1 within 1e-12 therefore signals a broken covariance and raises
    DegenerateMarginal.
    """
    n = cov.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"agent indices ({i},{j}) out of range for n={n}")
    if i == j:
        raise IndexError("pair marginal needs two distinct agents")
    si = cov.std(i)
    sj = cov.std(j)
    if si == 0.0 or sj == 0.0:
        raise DegenerateMarginal(f"zero variance at pair ({i},{j})")
    rho = float(cov.sigma[i, j]) / (si * sj)
    if abs(rho) >= 1.0 - DEGENERATE_RHO_TOL:
        raise DegenerateMarginal(f"|rho| = {abs(rho):.17g} at pair ({i},{j})")
    return PairMarginal(sigma_i=si, sigma_j=sj, rho=rho)


def export_covariance_csv(cov: SteadyCovariance, path: str) -> None:
    """Dump Sigma row-major with 17 significant digits for cross-tool checks."""
    with open(path, "w") as fh:
        for row in cov.sigma:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
