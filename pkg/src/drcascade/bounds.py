"""Analytic envelopes on the worst-case cascading risk.

The diagonal of the stationary covariance is pinched between the
extremal nonzero modal variances scaled by (1 - 1/n); pushing those
envelopes through the surrogate conditional expectation yields closed
upper and lower bounds on the supremal pair risk, plus network-level
fundamental limits in terms of the extremal Laplacian eigenvalues.

The bounds inherit the erfc-surrogate error, so they are approximate
envelopes: acceptance-grade checks compare them with an explicit
relative slack rather than asserting strict order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .ambiguity import (
    AmbiguitySpec,
    ambiguity_weights_uniform_delay,
    critical_lambda,
    mode_response,
)
from .covariance import SteadyCovariance, pair_marginal
from .errors import DegenerateMarginal
from .graphs import Spectrum
from .risk import ERFC_A, ERFC_B, RHO_MAX, FailureEvent

SQRT_2_PI = math.sqrt(2.0 / math.pi)

# slack term in the lower bound: 2 sqrt(theta/pi) evaluated at the residual
# theta = 1 - RHO_MAX^2 left by capping the correlation
DEFAULT_ETA = 2.0 * math.sqrt((1.0 - RHO_MAX**2) / math.pi)


@dataclass(frozen=True)
class EigenEnvelope:
    """Extremal modal variances scaled by (1 - 1/n) and by (1 + eps_plus).

    psi2_tilde <= sigma_i^2 <= psin_tilde holds for every agent; the
    plus-variants absorb the upper ambiguity radius.
    """

    psi2_tilde: float
    psin_tilde: float
    psi2_tilde_plus: float
    psin_tilde_plus: float


@dataclass(frozen=True)
class BoundReport:
    upper: float
    lower: float
    family: str
    eta: float

    def to_json(self) -> str:
        return json.dumps(
            {"upper": self.upper, "lower": self.lower, "family": self.family, "eta": self.eta}
        )


def eigen_envelope(cov: SteadyCovariance, eps_plus: float) -> EigenEnvelope:
    """Build the variance envelope of a covariance under a given radius."""
    n = cov.n
    scale = 1.0 - 1.0 / n
    p2 = cov.psi_min * scale
    pn = cov.psi_max * scale
    return EigenEnvelope(
        psi2_tilde=p2,
        psin_tilde=pn,
        psi2_tilde_plus=p2 * (1.0 + eps_plus),
        psin_tilde_plus=pn * (1.0 + eps_plus),
    )


def kappa(x: float, delta_bar: float) -> float:
    """Surrogate for E[|y| given |y| > delta_bar] at deviation scale x.

    kappa = B delta_bar / (1 - exp(-A delta_bar / (sqrt(2) x))); always
    at least B delta_bar, increasing in x.
    """
    if x <= 0:
        raise ValueError(f"deviation scale must be positive, got {x}")
    return ERFC_B * delta_bar / -math.expm1(-ERFC_A * delta_bar / (math.sqrt(2.0) * x))


def upper_bound(
    env: EigenEnvelope,
    ev: FailureEvent,
    family: str,
    rho0: float = 0.0,
    kappa_at_top: bool = False,
) -> float:
    """Upper envelope on the supremal pair risk.

    For the diffusion family the correlation stays nominal, so rho0
    enters directly. For the other families the default evaluates kappa
    at sqrt(psi2_tilde_plus); kappa_at_top=True switches its argument
    to sqrt(psin_tilde_plus), the variant implied by the derivation
    through the per-agent envelope. Both are exposed because the two
    disagree whenever the modal spread is wide.
    """
    top = math.sqrt(env.psin_tilde_plus)
    if family == "diffusion":
        r = abs(rho0)
        core = r * kappa(top, ev.delta_bar) + SQRT_2_PI * math.sqrt(1.0 - r * r)
    else:
        arg = top if kappa_at_top else math.sqrt(env.psi2_tilde_plus)
        core = math.sqrt(kappa(arg, ev.delta_bar) ** 2 + 2.0 / math.pi)
    return top * core - ev.c


def lower_bound(
    env: EigenEnvelope,
    ev: FailureEvent,
    family: str,
    rho0: float = 0.0,
    eta: float = DEFAULT_ETA,
) -> float:
    """Lower envelope on the supremal pair risk.

    eta is the slack left by stopping the correlation short of 1; it is
    reported alongside the bound in BoundReport.
    """
    low = math.sqrt(env.psi2_tilde_plus)
    if family == "diffusion":
        r = abs(rho0)
        core = abs(r * kappa(low, ev.delta_bar) - SQRT_2_PI * math.sqrt(1.0 - r * r))
    else:
        core = max(SQRT_2_PI, kappa(low, ev.delta_bar) - eta)
    return low * core - ev.c


def single_agent_bounds(env: EigenEnvelope, c: float) -> tuple[float, float]:
    """Bracket on the largest single-agent risk from the envelope."""
    return (
        math.sqrt(2.0 / math.pi * env.psi2_tilde_plus) - c,
        math.sqrt(2.0 / math.pi * env.psin_tilde_plus) - c,
    )


def profile_bounds(
    cov0: SteadyCovariance,
    spec: AmbiguitySpec,
    ev: FailureEvent,
    eta: float = DEFAULT_ETA,
    kappa_at_top: bool = False,
) -> BoundReport:
    """Bound report for a whole network instance.

    The diffusion-family formulas depend on the nominal correlation of
    the pair, so the global envelope takes the worst pair for each side;
    the other families are pair-independent.
    """
    env = eigen_envelope(cov0, spec.eps_plus)
    if spec.family == "diffusion":
        ub, lb = -math.inf, -math.inf
        n = cov0.n
        for i in range(n):
            for j in range(i + 1, n):
                try:
                    rho0 = pair_marginal(cov0, i, j).rho
                except DegenerateMarginal:
                    continue
                ub = max(ub, upper_bound(env, ev, spec.family, rho0, kappa_at_top))
                lb = max(lb, lower_bound(env, ev, spec.family, rho0, eta))
        return BoundReport(upper=ub, lower=lb, family=spec.family, eta=eta)
    return BoundReport(
        upper=upper_bound(env, ev, spec.family, kappa_at_top=kappa_at_top),
        lower=lower_bound(env, ev, spec.family, eta=eta),
        family=spec.family,
        eta=eta,
    )


def _limit_scale(spectrum: Spectrum, tau0: float, b0: float, alpha_w: float):
    """Shared setup for the network limits: radius, regime eigenvalue."""
    spec_w = ambiguity_weights_uniform_delay(spectrum, tau0, alpha_w)
    if tau0 == 0:
        lam = spectrum.lambda_n
    else:
        lbar = critical_lambda(tau0).lambda_bar
        if spectrum.lambda_n * (1.0 + alpha_w) <= lbar:
            lam = spectrum.lambda_n
        else:
            # straddling already rejected by the ambiguity constructor
            lam = spectrum.lambda_2
    fbar = b0 * math.sqrt(float(mode_response(lam, tau0)) * (1.0 + spec_w.eps_plus))
    return fbar


def fundamental_limit(
    spectrum: Spectrum,
    tau0: float,
    b0: float,
    alpha_w: float,
    ev: FailureEvent,
    eta: float = DEFAULT_ETA,
) -> float:
    """Network-induced floor on the supremal cascading risk.

    Under uniform weight uncertainty the floor is governed by the modal
    response at the largest Laplacian eigenvalue (decreasing regime) or
    at the Fiedler eigenvalue (increasing regime). At tau = 0 the
    response is 1/lambda, so the floor scales like 1/sqrt(lambda_n).
    """
    fbar = _limit_scale(spectrum, tau0, b0, alpha_w)
    return fbar * max(SQRT_2_PI, kappa(fbar, ev.delta_bar) - eta) - ev.c


def single_agent_limit(
    spectrum: Spectrum, tau0: float, b0: float, alpha_w: float, c: float
) -> float:
    """Network-induced floor on the largest single-agent risk.

    At tau = 0 this is sqrt(2/pi (1 + eps_w) / lambda_n) b0 - c: the
    floor times sqrt(lambda_n) is bounded below by a constant set only
    by the ambiguity radius.
    """
    fbar = _limit_scale(spectrum, tau0, b0, alpha_w)
    return SQRT_2_PI * fbar - c
