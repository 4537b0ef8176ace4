"""Conditional failure risk and its worst case over an ambiguity set.

Given that agent i's observable left the tolerance band (|y_i| beyond
delta + c), the expected deviation of agent j has the closed form

    E = sqrt(2/pi) * sigma_j / erfc(d*) *
        [erfc(d*/rho') + rho erf(rho d*/rho') exp(-d*^2)],
    d* = (delta + c) / (sqrt(2) sigma_i),

which is even in rho. Deep in the tail erfc(d*) underflows, so a
surrogate built from the exponential-type erfc approximation

    erfc(x) ~ (1 - exp(-A x)) exp(-x^2) / (B sqrt(pi) x),
    A = 1.98, B = 1.135,

stays finite everywhere and is the default objective for worst-case
optimization. The distributionally robust (DR) risk of agent j is the
supremum of E - c over marginals consistent with the ambiguity radii,
clamped at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

from .ambiguity import AmbiguitySpec
from .covariance import PairMarginal, SteadyCovariance, pair_marginal
from .errors import NumericalUnderflow

ERFC_A = 1.98
ERFC_B = 1.135

# the feasible correlation set is open; the objective is continuous up to
# |rho| = 1 on the surrogate path, so we cap there
RHO_MAX = 1.0 - 1e-6

# below this, erfc(d*) is too deep for the exact path in double precision
UNDERFLOW_FLOOR = 1e-290

# optimizer knobs: coarse grid then cyclic golden-section refinement
GRID_POINTS = 64
REFINE_SWEEPS = 3
REFINE_TOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FailureEvent:
    """Failure of one agent: |y_agent| exceeded delta + c.

    delta >= 0 is the observed deviation magnitude beyond the tolerance
    band and c > 0 the consensus tolerance; the conditioning set is the
    symmetric two-sided tail beyond delta_bar = delta + c.
    """

    agent: int
    delta: float
    c: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"deviation magnitude must be nonnegative, got {self.delta}")
        if self.c <= 0:
            raise ValueError(f"consensus tolerance must be positive, got {self.c}")

    @property
    def delta_bar(self) -> float:
        return self.delta + self.c


@dataclass(frozen=True)
class AgentRisk:
    agent: int
    single_risk: float
    nominal_risk: float
    dr_risk: float


@dataclass(frozen=True)
class RiskProfile:
    """Per-agent risk triple given one failed agent.

    The entry at the failed agent holds its single-agent risk in the
    dr/nominal columns; every other entry is the cascading risk of that
    agent conditioned on the failure.
    """

    failed_agent: int
    per_agent: tuple[AgentRisk, ...]

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("agent,single_risk,nominal_risk,dr_risk\n")
            for r in self.per_agent:
                fh.write(
                    f"{r.agent},{r.single_risk:.17g},{r.nominal_risk:.17g},{r.dr_risk:.17g}\n"
                )

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.per_agent])


@dataclass(frozen=True)
class DrRiskResult:
    """Worst-case pair risk and the marginal at which it is attained."""

    dr_risk: float
    sigma_i: float
    sigma_j: float
    rho: float


def approx_h_terms(delta_star, rho):
    """The two surrogate terms (H1, H2) at given d* > 0 and correlation.

    H1 carries the decorrelated part and decreases in |rho|; H2 carries
    the correlated part and increases in |rho|. Array-friendly.
    """
    ds = np.asarray(delta_star, dtype=float)
    rho = np.asarray(rho, dtype=float)
    r = np.abs(rho)
    rp = np.sqrt(1.0 - rho * rho)
    base = -np.expm1(-ERFC_A * ds)
    h1 = rp * (-np.expm1(-ERFC_A * ds / rp)) / base * np.exp(-(r * r) / (rp * rp) * ds * ds)
    h2 = r * ERFC_B * math.sqrt(math.pi) * ds / base * erf(r * ds / rp)
    return h1, h2


def approx_expectation(sigma_i, sigma_j, rho, delta_bar):
    """Surrogate conditional expectation, array-friendly in every argument."""
    sigma_i = np.asarray(sigma_i, dtype=float)
    sigma_j = np.asarray(sigma_j, dtype=float)
    ds = np.asarray(delta_bar, dtype=float) / (math.sqrt(2.0) * sigma_i)
    h1, h2 = approx_h_terms(ds, rho)
    out = math.sqrt(2.0 / math.pi) * sigma_j * (h1 + h2)
    return out if np.ndim(out) else float(out)


def conditional_expectation_exact(pm: PairMarginal, ev: FailureEvent) -> float:
    """Closed-form E[|y_j| | y_i in the failure tail].

    Evaluated at |rho| (the expression is even in rho). Raises
    NumericalUnderflow when erfc(d*) is below the double-precision
    floor; callers should switch to conditional_expectation_approx.
    """
    ds = ev.delta_bar / (math.sqrt(2.0) * pm.sigma_i)
    denom = float(erfc(ds))
    if denom < UNDERFLOW_FLOOR:
        raise NumericalUnderflow(
            f"erfc(d*) = {denom:.3g} at d* = {ds:.6g}; use the approximate path"
        )
    r = abs(pm.rho)
    rp = pm.rho_prime
    bracket = float(erfc(ds / rp)) + r * float(erf(r * ds / rp)) * math.exp(-ds * ds)
    return math.sqrt(2.0 / math.pi) * pm.sigma_j * bracket / denom


def conditional_expectation_approx(pm: PairMarginal, ev: FailureEvent) -> float:
    """Surrogate E[|y_j| | failure]; finite for all |rho| < 1, any depth."""
    return float(approx_expectation(pm.sigma_i, pm.sigma_j, pm.rho, ev.delta_bar))


def single_agent_dr_risk(
    sigma0_j: float, eps_plus: float, c: float, sqrt_radius: bool = False
) -> float:
    """Worst-case risk of one agent in isolation (uncorrelated case).

    With the radius applied linearly to the standard deviation the risk
    is sqrt(2/pi) sigma (1 + eps) - c, zero when sigma is below
    sqrt(pi/2) c / (1 + eps). sqrt_radius=True applies sqrt(1 + eps)
    instead, matching how the pair optimizer scales marginals; the two
    conventions differ by at most a factor sqrt(1 + eps).
    """
    factor = math.sqrt(1.0 + eps_plus) if sqrt_radius else 1.0 + eps_plus
    if sigma0_j <= math.sqrt(math.pi / 2.0) * c / factor:
        return 0.0
    return math.sqrt(2.0 / math.pi) * sigma0_j * factor - c


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization of a scalar function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    xm = 0.5 * (a + b)
    return xm, f(xm)


def _maximize_box(f, lows, highs):
    """Coarse grid + cyclic golden-section refinement over a small box.

    Deterministic; the grid guards against local maxima and refinement
    pins the best coordinate values to REFINE_TOL.
    """
    axes = [np.linspace(lo, hi, GRID_POINTS) for lo, hi in zip(lows, highs)]
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = f(*mesh)
    flat = int(np.argmax(vals))
    idx = np.unravel_index(flat, vals.shape)
    x = [float(axes[k][idx[k]]) for k in range(len(axes))]
    best = float(vals[idx])
    for _ in range(REFINE_SWEEPS):
        for k in range(len(x)):
            h = (highs[k] - lows[k]) / (GRID_POINTS - 1)
            lo = max(lows[k], x[k] - h)
            hi = min(highs[k], x[k] + h)
            if hi <= lo:
                continue

            def fk(t, k=k):
                args = list(x)
                args[k] = t
                return float(f(*args))

            xk, fk_val = _golden_max(fk, lo, hi, REFINE_TOL)
            if fk_val > best:
                x[k], best = xk, fk_val
    return x, best


def dr_risk_pair(pm0: PairMarginal, spec: AmbiguitySpec, ev: FailureEvent) -> DrRiskResult:
    """Worst-case cascading risk of one pair over the ambiguity set.

    Maximizes the surrogate conditional expectation minus c over the
    feasible marginals: both standard deviations range over
    [sqrt(1-eps_minus), sqrt(1+eps_plus)] times nominal, and |rho| over
    [0, RHO_MAX] (the objective is even in rho). The diffusion family
    collapses to the one-parameter curve sigma -> sqrt(1+theta) sigma_0
    with rho pinned at nominal. A degenerate spec (both radii zero)
    reduces to the nominal measure exactly, rho included.
    """
    db = ev.delta_bar
    nominal = float(approx_expectation(pm0.sigma_i, pm0.sigma_j, pm0.rho, db))
    if spec.degenerate:
        return DrRiskResult(
            dr_risk=max(0.0, nominal - ev.c),
            sigma_i=pm0.sigma_i,
            sigma_j=pm0.sigma_j,
            rho=pm0.rho,
        )
    if spec.family == "diffusion":
        a = spec.alpha

        def obj(theta):
            s = np.sqrt(1.0 + theta)
            return approx_expectation(s * pm0.sigma_i, s * pm0.sigma_j, pm0.rho, db)

        (theta,), best = _maximize_box(obj, [-a], [a])
        if nominal > best:
            theta, best = 0.0, nominal
        s = math.sqrt(1.0 + theta)
        return DrRiskResult(
            dr_risk=max(0.0, best - ev.c),
            sigma_i=s * pm0.sigma_i,
            sigma_j=s * pm0.sigma_j,
            rho=pm0.rho,
        )

    lo = math.sqrt(1.0 - spec.eps_minus)
    hi = math.sqrt(1.0 + spec.eps_plus)

    def obj(si, sj, rho):
        return approx_expectation(si, sj, rho, db)

    (si, sj, rho), best = _maximize_box(
        obj,
        [lo * pm0.sigma_i, lo * pm0.sigma_j, 0.0],
        [hi * pm0.sigma_i, hi * pm0.sigma_j, RHO_MAX],
    )
    if nominal > best:
        si, sj, rho, best = pm0.sigma_i, pm0.sigma_j, pm0.rho, nominal
    return DrRiskResult(dr_risk=max(0.0, best - ev.c), sigma_i=si, sigma_j=sj, rho=rho)


def risk_profile(
    cov0: SteadyCovariance, spec: AmbiguitySpec, ev: FailureEvent
) -> RiskProfile:
    """Assemble the full per-agent risk vector for one failed agent.

    Each agent j != failed gets the worst-case pair risk and the risk
    under the nominal covariance; the failed agent's slot carries its
    single-agent risk. Every row also reports the single-agent risk of
    that agent for reference.
    """
    n = cov0.n
    i = ev.agent
    if not (0 <= i < n):
        raise IndexError(f"failed agent {i} out of range for n={n}")
    rows = []
    for j in range(n):
        single = single_agent_dr_risk(cov0.std(j), spec.eps_plus, ev.c)
        if j == i:
            nominal = single_agent_dr_risk(cov0.std(j), 0.0, ev.c)
            dr = single
        else:
            pm0 = pair_marginal(cov0, i, j)
            nominal = max(
                0.0,
                float(approx_expectation(pm0.sigma_i, pm0.sigma_j, pm0.rho, ev.delta_bar))
                - ev.c,
            )
            dr = dr_risk_pair(pm0, spec, ev).dr_risk
        rows.append(AgentRisk(agent=j, single_risk=single, nominal_risk=nominal, dr_risk=dr))
    return RiskProfile(failed_agent=i, per_agent=tuple(rows))
