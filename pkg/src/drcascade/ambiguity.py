"""Ambiguity-set radii induced by bounded parameter uncertainty.

Each constructor maps a relative uncertainty level alpha for one
parameter family onto radii (eps_minus, eps_plus) such that every
admissible parameter draw produces a stationary covariance Sigma with

    (1 - eps_minus) Sigma_0 <= Sigma <= (1 + eps_plus) Sigma_0

in the positive semidefinite order. Families:

- "diffusion": bounded b^2; radii equal alpha and the pairwise
  correlations are untouched.
- "delay": bounded tau around tau_0; radii from the worst relative
  change of the modal response over the Laplacian modes.
- "weights_zero_delay": per-edge weight bounds at tau = 0, via the
  Laplacian pseudoinverse.
- "weights_uniform_delay": uniform weight scaling at tau != 0; only
  valid when the scaled spectrum stays on one side of the critical
  eigenvalue where the modal response changes monotonicity.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditioningWarning,
    OutOfRange,
    PerturbationTooLarge,
    RegimeStraddle,
    UnstableDelay,
)
from .graphs import Spectrum, WeightedGraph, laplacian

FAMILIES = ("diffusion", "delay", "weights_zero_delay", "weights_uniform_delay")

# reported radii are capped here; values this size mean the instance sits
# essentially on the stability boundary
EPS_CAP = 1e6

# fixed point of u = cos(u), found once by bisection at import
_DOTTIE = None


@dataclass(frozen=True)
class AmbiguitySpec:
    """One parameter family with its uncertainty level and radii."""

    family: str
    alpha: float
    eps_minus: float
    eps_plus: float
    rho_fixed: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    @property
    def degenerate(self) -> bool:
        """True when the set collapses to the nominal measure."""
        return self.eps_minus == 0.0 and self.eps_plus == 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.family,
                "alpha": self.alpha,
                "eps_minus": self.eps_minus,
                "eps_plus": self.eps_plus,
            }
        )

    @staticmethod
    def from_json(text: str) -> "AmbiguitySpec":
        d = json.loads(text)
        return AmbiguitySpec(
            family=d["family"],
            alpha=float(d["alpha"]),
            eps_minus=float(d["eps_minus"]),
            eps_plus=float(d["eps_plus"]),
            rho_fixed=d["family"] == "diffusion",
        )


@dataclass(frozen=True)
class CriticalLambda:
    """Eigenvalue where the modal response switches monotonicity.

    lambda_bar * tau is the unique fixed point of u = cos(u); below
    lambda_bar the response decreases in lambda, above it increases.
    """

    lambda_bar: float
    tau: float


def mode_response(lam, tau: float):
    """Per-mode response cos(lam tau) / (lam (1 - sin(lam tau))).

    Equals twice the modal variance at unit diffusion. Reduces to
    1/lam at tau = 0. Accepts scalars or arrays in lam.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("mode eigenvalues must be positive")
    if tau == 0:
        out = 1.0 / lam
    else:
        x = lam * tau
        if np.any(x >= math.pi / 2):
            raise UnstableDelay(f"lambda*tau reaches {float(np.max(x)):.6g} >= pi/2")
        out = np.cos(x) / (lam * (1.0 - np.sin(x)))
    return out if out.ndim else float(out)


def _check_alpha(alpha: float) -> float:
    if not (0.0 <= alpha < 1.0):
        raise OutOfRange(f"relative uncertainty must lie in [0, 1), got {alpha}")
    return float(alpha)


def _cap(eps: float) -> float:
    if eps > EPS_CAP:
        warnings.warn(
            f"ambiguity radius {eps:.3e} capped at {EPS_CAP:.0e}; instance is "
            "near the stability boundary",
            ConditioningWarning,
            stacklevel=3,
        )
        return EPS_CAP
    return eps


def ambiguity_diffusion(alpha_b: float) -> AmbiguitySpec:
    """Radii for bounded diffusion: (1-a) b0^2 <= b^2 <= (1+a) b0^2.

    The covariance scales linearly in b^2, so both radii equal alpha
    and pairwise correlations stay at their nominal values.
    """
    alpha = _check_alpha(alpha_b)
    return AmbiguitySpec(
        family="diffusion", alpha=alpha, eps_minus=alpha, eps_plus=alpha, rho_fixed=True
    )


def ambiguity_delay(spectrum: Spectrum, tau0: float, alpha_tau: float) -> AmbiguitySpec:
    """Radii for bounded delay: (1-a) tau0 <= tau <= (1+a) tau0.

    The modal response is strictly increasing in tau, so the radii come
    from its worst-case relative change across modes; they are asymmetric
    because the response is nonlinear.
    """
    alpha = _check_alpha(alpha_tau)
    if tau0 < 0:
        raise OutOfRange(f"nominal delay must be nonnegative, got {tau0}")
    lam = spectrum.eigenvalues[1:]
    if (1.0 + alpha) * tau0 * spectrum.lambda_n >= math.pi / 2:
        raise UnstableDelay(
            f"perturbed delay (1+alpha)*tau0 = {(1 + alpha) * tau0:.6g} violates "
            f"tau < pi/(2 lambda_n) = {math.pi / (2 * spectrum.lambda_n):.6g}"
        )
    if tau0 == 0 or alpha == 0:
        return AmbiguitySpec(family="delay", alpha=alpha, eps_minus=0.0, eps_plus=0.0)
    f0 = np.array([mode_response(l, tau0) for l in lam])
    f_hi = np.array([mode_response(l, (1.0 + alpha) * tau0) for l in lam])
    f_lo = np.array([mode_response(l, (1.0 - alpha) * tau0) for l in lam])
    eps_plus = float(np.max((f_hi - f0) / f0))
    eps_minus = float(np.max((f0 - f_lo) / f0))
    return AmbiguitySpec(
        family="delay",
        alpha=alpha,
        eps_minus=max(0.0, eps_minus),
        eps_plus=_cap(max(0.0, eps_plus)),
    )


def ambiguity_weights_zero_delay(g0: WeightedGraph, alpha) -> AmbiguitySpec:
    """Radii for per-edge weight bounds at zero delay.

    Parameters
    ----------
    g0 : WeightedGraph
        Nominal graph.
    alpha : float or array of length g0.m
        Relative uncertainty per edge (scalar broadcasts), aligned with
        g0.edges. Each entry must lie in [0, 1).

    The worst additive Laplacian perturbation Delta is the weighted sum
    of edge outer products; radii follow from nu = ||Delta L0^+|| in the
    spectral norm, which must be < 1 for a finite upper radius.
    """
    alpha_vec = np.broadcast_to(np.asarray(alpha, dtype=float), (g0.m,)).copy()
    if np.any(alpha_vec < 0) or np.any(alpha_vec >= 1):
        raise OutOfRange("per-edge uncertainties must lie in [0, 1)")
    alpha_max = float(alpha_vec.max()) if g0.m else 0.0
    if alpha_max == 0.0:
        return AmbiguitySpec(
            family="weights_zero_delay", alpha=0.0, eps_minus=0.0, eps_plus=0.0
        )
    n = g0.n
    delta = np.zeros((n, n))
    for (i, j, w), a in zip(g0.edges, alpha_vec):
        delta[i, i] += a * w
        delta[j, j] += a * w
        delta[i, j] -= a * w
        delta[j, i] -= a * w
    L0 = laplacian(g0)
    L0_pinv = np.linalg.pinv(L0, hermitian=True)
    nu = float(np.linalg.norm(delta @ L0_pinv, 2))
    if nu >= 1.0:
        raise PerturbationTooLarge(f"||Delta L0^+|| = {nu:.6g} >= 1")
    return AmbiguitySpec(
        family="weights_zero_delay",
        alpha=alpha_max,
        eps_minus=nu / (1.0 + nu),
        eps_plus=_cap(nu / (1.0 - nu)),
    )


def _dottie() -> float:
    global _DOTTIE
    if _DOTTIE is None:
        lo, hi = 0.0, math.pi / 2
        while hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            if mid - math.cos(mid) < 0:
                lo = mid
            else:
                hi = mid
        _DOTTIE = 0.5 * (lo + hi)
    return _DOTTIE


def critical_lambda(tau: float) -> CriticalLambda:
    """Eigenvalue lambda_bar with lambda_bar * tau = cos(lambda_bar * tau).

    Found by bisection on [0, pi/2] for the fixed point of u = cos(u);
    the root is unique because u - cos(u) is strictly increasing there.
    """
    if tau <= 0:
        raise OutOfRange(f"critical eigenvalue needs tau > 0, got {tau}")
    return CriticalLambda(lambda_bar=_dottie() / tau, tau=tau)


def ambiguity_weights_uniform_delay(
    spectrum: Spectrum, tau0: float, alpha: float
) -> AmbiguitySpec:
    """Radii for uniform weight scaling with nonzero delay.

    Scaling all weights by s scales every Laplacian eigenvalue by s, so
    the radii follow from the relative change of the modal response at
    scaled eigenvalues. The response decreases below lambda_bar and
    increases above, so a one-sided spectrum is required:

    - decreasing regime, lambda_n (1+alpha) <= lambda_bar: scaling up
      shrinks the response, so eps_minus tracks the (1+alpha) change
      and eps_plus the (1-alpha) change;
    - increasing regime, lambda_2 (1-alpha) >= lambda_bar: the
      assignments swap.

    A spectrum straddling lambda_bar admits no bound of this form and
    raises RegimeStraddle.
    """
    alpha = _check_alpha(alpha)
    if tau0 < 0:
        raise OutOfRange(f"nominal delay must be nonnegative, got {tau0}")
    lam = np.asarray(spectrum.eigenvalues[1:], dtype=float)
    if (1.0 + alpha) * spectrum.lambda_n * tau0 >= math.pi / 2:
        raise UnstableDelay(
            f"scaled top eigenvalue (1+alpha) lambda_n tau0 = "
            f"{(1 + alpha) * spectrum.lambda_n * tau0:.6g} >= pi/2"
        )
    if alpha == 0.0:
        return AmbiguitySpec(
            family="weights_uniform_delay", alpha=0.0, eps_minus=0.0, eps_plus=0.0
        )
    lambda_bar = math.inf if tau0 == 0 else critical_lambda(tau0).lambda_bar
    f0 = mode_response(lam, tau0)
    chi_plus = np.abs(mode_response((1.0 + alpha) * lam, tau0) - f0) / f0
    chi_minus = np.abs(mode_response((1.0 - alpha) * lam, tau0) - f0) / f0
    if spectrum.lambda_n * (1.0 + alpha) <= lambda_bar:
        eps_minus, eps_plus = float(chi_plus.max()), float(chi_minus.max())
    elif spectrum.lambda_2 * (1.0 - alpha) >= lambda_bar:
        eps_minus, eps_plus = float(chi_minus.max()), float(chi_plus.max())
    else:
        raise RegimeStraddle(
            f"scaled spectrum [{spectrum.lambda_2 * (1 - alpha):.6g}, "
            f"{spectrum.lambda_n * (1 + alpha):.6g}] straddles "
            f"lambda_bar = {lambda_bar:.6g}"
        )
    return AmbiguitySpec(
        family="weights_uniform_delay",
        alpha=alpha,
        eps_minus=eps_minus,
        eps_plus=_cap(eps_plus),
    )
