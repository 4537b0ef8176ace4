"""Command-line front end: risk profiles, validation runs, and sweeps.

Scenarios resolve from an optional JSON document plus flag overrides;
every resolved value is echoed into the output metadata so a run can be
reproduced from its artifacts alone. All outputs are deterministic for
a fixed scenario and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import bounds as bounds_mod
from .ambiguity import (
    FAMILIES,
    ambiguity_delay,
    ambiguity_diffusion,
    ambiguity_weights_uniform_delay,
    ambiguity_weights_zero_delay,
)
from .covariance import NetworkParams, pair_marginal, steady_covariance
from .errors import ConfigError, DrCascadeError
from .graphs import WeightedGraph, generate_topology, load_graph, spectrum_of
from .oracles import brute_force_dr_risk, conditional_expectation_mc, conditional_expectation_quadrature
from .risk import FailureEvent, conditional_expectation_exact, dr_risk_pair, risk_profile
from .sde import SimConfig, simulate


@dataclass(frozen=True)
class Scenario:
    """Fully resolved run description; round-trips through JSON."""

    topology: str = "complete"
    n: int = 21
    weight: float = 0.5
    p: int = 1
    graph: dict | None = None
    graph_file: str | None = None
    b0: float = 4.0
    tau0: float = 0.05
    family: str = "diffusion"
    alpha: float = 0.05
    failed_agent: int = 10
    delta: float = 5.0
    c: float = 0.1
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "Scenario":
        known = {f for f in Scenario.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown scenario keys: {sorted(extra)}")
        return Scenario(**data)

    def build_graph(self) -> WeightedGraph:
        if self.graph is not None:
            return WeightedGraph.from_dict(self.graph)
        if self.graph_file is not None:
            return load_graph(self.graph_file)
        return generate_topology(self.topology, self.n, self.weight, self.p)


def make_ambiguity(scenario: Scenario, g: WeightedGraph, spectrum):
    family = scenario.family
    if family == "diffusion":
        return ambiguity_diffusion(scenario.alpha)
    if family == "delay":
        return ambiguity_delay(spectrum, scenario.tau0, scenario.alpha)
    if family == "weights_zero_delay":
        if scenario.tau0 != 0:
            raise ConfigError("family weights_zero_delay requires tau0 = 0")
        return ambiguity_weights_zero_delay(g, scenario.alpha)
    if family == "weights_uniform_delay":
        return ambiguity_weights_uniform_delay(spectrum, scenario.tau0, scenario.alpha)
    raise ConfigError(f"unknown family {family!r}; choose one of {FAMILIES}")


def _scenario_from_args(args) -> Scenario:
    base = Scenario()
    if getattr(args, "scenario", None):
        with open(args.scenario) as fh:
            base = Scenario.from_dict(json.load(fh))
    overrides = {}
    for field in (
        "topology", "n", "weight", "p", "graph_file", "b0", "tau0",
        "family", "alpha", "failed_agent", "delta", "c", "seed",
    ):
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "graph", None):
        overrides["graph_file"] = args.graph
    return replace(base, **overrides)


def _prepare(scenario: Scenario):
    g = scenario.build_graph()
    spectrum = spectrum_of(g)
    cov0 = steady_covariance(spectrum, NetworkParams(b=scenario.b0, tau=scenario.tau0))
    spec = make_ambiguity(scenario, g, spectrum)
    ev = FailureEvent(agent=scenario.failed_agent, delta=scenario.delta, c=scenario.c)
    return g, spectrum, cov0, spec, ev


def cmd_risk(args) -> int:
    scenario = _scenario_from_args(args)
    g, spectrum, cov0, spec, ev = _prepare(scenario)
    profile = risk_profile(cov0, spec, ev)
    report = bounds_mod.profile_bounds(cov0, spec, ev)
    out = args.out or "risk"
    profile.to_csv(out + ".csv")
    meta = {
        "scenario": scenario.to_dict(),
        "ambiguity": json.loads(spec.to_json()),
        "bounds": json.loads(report.to_json()),
        "lambda_2": spectrum.lambda_2,
        "lambda_n": spectrum.lambda_n,
    }
    with open(out + ".bounds.json", "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
    print(f"wrote {out}.csv and {out}.bounds.json")
    return 0


def cmd_validate(args) -> int:
    scenario = _scenario_from_args(args)
    g, spectrum, cov0, spec, ev = _prepare(scenario)
    checks = []

    cfg = SimConfig(
        dt=args.dt, horizon=args.horizon, burn_in=args.burn_in,
        trajectories=args.trajectories, seed=scenario.seed, thin=args.thin,
    )
    stats = simulate(g, NetworkParams(b=scenario.b0, tau=scenario.tau0), cfg)
    dev = float(np.max(np.abs(stats.cov - cov0.sigma))) / cov0.psi_max
    checks.append(
        {"name": "sde_covariance_vs_analytic", "tolerance": args.sde_tol, "observed": dev,
         "pass": dev < args.sde_tol}
    )

    others = [j for j in range(g.n) if j != ev.agent]
    pm = pair_marginal(cov0, ev.agent, others[0])
    exact = conditional_expectation_exact(pm, ev)
    quadr = conditional_expectation_quadrature(pm, ev)
    rel = abs(exact - quadr) / quadr
    checks.append(
        {"name": "exact_vs_quadrature", "tolerance": 1e-6, "observed": rel,
         "pass": rel < 1e-6}
    )
    mc = conditional_expectation_mc(pm, ev, n_samples=200_000, seed=scenario.seed)
    z = abs(exact - mc.estimate) / mc.stderr
    checks.append(
        {"name": "exact_vs_monte_carlo", "tolerance": 3.0, "observed": z, "pass": z < 3.0}
    )

    opt = dr_risk_pair(pm, spec, ev).dr_risk
    ref = brute_force_dr_risk(pm, spec, ev, grid_points=120)
    gap = abs(opt - ref)
    checks.append(
        {"name": "optimizer_vs_grid", "tolerance": 1e-4, "observed": gap, "pass": gap < 1e-4}
    )

    report = {"scenario": scenario.to_dict(), "checks": checks,
              "all_pass": all(c["pass"] for c in checks)}
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text)
    return 0 if report["all_pass"] else 1


def cmd_sweep(args) -> int:
    scenario = _scenario_from_args(args)
    values = [float(v) for v in args.sweep_values.split(",")]
    rows = []
    any_ok = False
    for value in values:
        if args.sweep_param == "weight":
            sc = replace(scenario, weight=value)
        elif args.sweep_param == "alpha":
            sc = replace(scenario, alpha=value)
        elif args.sweep_param == "tau0":
            sc = replace(scenario, tau0=value)
        elif args.sweep_param == "b0":
            sc = replace(scenario, b0=value)
        else:
            raise ConfigError(f"unknown sweep parameter {args.sweep_param!r}")
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                _, _, cov0, spec, ev = _prepare(sc)
                profile = risk_profile(cov0, spec, ev)
            status = ";".join(sorted({w.category.__name__ for w in caught})) or "ok"
            for r in profile.per_agent:
                rows.append(
                    (value, r.agent, f"{r.single_risk:.17g}", f"{r.nominal_risk:.17g}",
                     f"{r.dr_risk:.17g}", status)
                )
            any_ok = True
        except DrCascadeError as exc:
            rows.append((value, "", "", "", "", type(exc).__name__))
    out = args.out or "sweep.csv"
    with open(out, "w") as fh:
        fh.write(f"{args.sweep_param},agent,single_risk,nominal_risk,dr_risk,status\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    print(f"wrote {out} ({len(rows)} rows)")
    return 0 if any_ok else 2


def cmd_simulate(args) -> int:
    scenario = _scenario_from_args(args)
    g = scenario.build_graph()
    cfg = SimConfig(
        dt=args.dt, horizon=args.horizon, burn_in=args.burn_in,
        trajectories=args.trajectories, seed=scenario.seed, thin=args.thin,
    )
    stats = simulate(
        g, NetworkParams(b=scenario.b0, tau=scenario.tau0), cfg, dump_path=args.dump
    )
    report = {
        "scenario": scenario.to_dict(),
        "samples": stats.samples,
        "stderr_scale": stats.stderr_scale,
        "mean": stats.mean.tolist(),
        "cov": stats.cov.tolist(),
    }
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text)
    return 0


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="scenario JSON file; flags override its entries")
    p.add_argument("--graph", help="graph JSON file {'n': int, 'edges': [[i,j,w],...]}")
    p.add_argument("--topology", choices=["complete", "path", "cycle"],
                   help="generated topology (default complete)")
    p.add_argument("--n", type=int, help="agent count (default 21)")
    p.add_argument("--weight", type=float, help="edge weight for generated topologies (default 0.5)")
    p.add_argument("--p", type=int, help="cycle neighborhood radius (default 1)")
    p.add_argument("--b0", type=float, help="nominal diffusion coefficient (default 4.0)")
    p.add_argument("--tau0", type=float, help="nominal time delay (default 0.05)")
    p.add_argument("--family", choices=list(FAMILIES),
                   help="ambiguity family (default diffusion)")
    p.add_argument("--alpha", type=float, help="relative parameter uncertainty (default 0.05)")
    p.add_argument("--failed-agent", dest="failed_agent", type=int,
                   help="0-based failed agent index (default 10)")
    p.add_argument("--delta", type=float, help="observed deviation magnitude (default 5.0)")
    p.add_argument("--c", type=float, help="consensus tolerance (default 0.1)")
    p.add_argument("--seed", type=int, help="RNG seed for stochastic subcommands (default 0)")
    p.add_argument("--out", help="output path or prefix")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dt", type=float, default=1e-3, help="integration step (default 1e-3)")
    p.add_argument("--horizon", type=float, default=200.0, help="total simulated time (default 200)")
    p.add_argument("--burn-in", dest="burn_in", type=float, default=20.0,
                   help="discarded initial time (default 20)")
    p.add_argument("--trajectories", type=int, default=64, help="ensemble size (default 64)")
    p.add_argument("--thin", type=int, default=100, help="steps between samples (default 100)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drcascade",
        description="Distributionally robust cascading-failure risk for "
        "noisy time-delayed consensus networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_risk = sub.add_parser("risk", help="per-agent risk profile CSV + bounds JSON")
    _add_scenario_flags(p_risk)
    p_risk.set_defaults(func=cmd_risk)

    p_val = sub.add_parser("validate", help="simulator and oracle cross-checks")
    _add_scenario_flags(p_val)
    _add_sim_flags(p_val)
    p_val.add_argument("--sde-tol", dest="sde_tol", type=float, default=0.05,
                       help="covariance deviation tolerance relative to the "
                       "largest modal variance (default 0.05)")
    p_val.set_defaults(func=cmd_validate)

    p_sweep = sub.add_parser("sweep", help="risk profile along one parameter axis")
    _add_scenario_flags(p_sweep)
    p_sweep.add_argument("--sweep-param", dest="sweep_param", required=True,
                         choices=["weight", "alpha", "tau0", "b0"])
    p_sweep.add_argument("--sweep-values", dest="sweep_values", required=True,
                         help="comma-separated grid values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", help="run the delayed-network simulator")
    _add_scenario_flags(p_sim)
    _add_sim_flags(p_sim)
    p_sim.add_argument("--dump", help="optional raw observables CSV")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DrCascadeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
