"""Cascading-risk profiles across topologies and uncertainty families.

A team of 21 agents negotiates a rendezvous time over a noisy, delayed
consensus network. Agent 10 has already blown through the agreement
band by 5 units; we ask how much expected disagreement that failure
induces at every other agent, in the worst case over three kinds of
bounded parameter uncertainty.

Writes one CSV per (topology, family) pair and prints a summary table.

Run: python demos/risk_profile_topologies.py [output_dir]
"""

import sys

import numpy as np

from drcascade import (
    FailureEvent,
    NetworkParams,
    ambiguity_delay,
    ambiguity_diffusion,
    ambiguity_weights_uniform_delay,
    generate_topology,
    risk_profile,
    spectrum_of,
    steady_covariance,
)

OUT_DIR = sys.argv[1] if len(sys.argv) > 1 else "."

N = 21
WEIGHT = 0.5
B0 = 4.0
TAU0 = 0.05
ALPHA = 0.05  # 5% relative uncertainty on each parameter
EVENT = FailureEvent(agent=10, delta=5.0, c=0.1)

TOPOLOGIES = {
    "complete": generate_topology("complete", N, WEIGHT),
    "cycle_p3": generate_topology("cycle", N, WEIGHT, p=3),
    "cycle_p7": generate_topology("cycle", N, WEIGHT, p=7),
    "path": generate_topology("path", N, WEIGHT),
}


def families_for(graph, spectrum):
    return {
        "diffusion": ambiguity_diffusion(ALPHA),
        "delay": ambiguity_delay(spectrum, TAU0, ALPHA),
        "weights": ambiguity_weights_uniform_delay(spectrum, TAU0, ALPHA),
    }


print(f"{'topology':10s} {'family':10s} {'min dr':>8s} {'median':>8s} {'max dr':>8s}  shape")
for name, g in TOPOLOGIES.items():
    spectrum = spectrum_of(g)
    cov = steady_covariance(spectrum, NetworkParams(b=B0, tau=TAU0))
    for fam_name, spec in families_for(g, spectrum).items():
        prof = risk_profile(cov, spec, EVENT)
        prof.to_csv(f"{OUT_DIR}/profile_{name}_{fam_name}.csv")
        dr = np.delete(prof.column("dr_risk"), EVENT.agent)
        spread = dr.max() - dr.min()
        shape = "uniform" if spread < 1e-6 else "position-dependent"
        print(
            f"{name:10s} {fam_name:10s} {dr.min():8.3f} {np.median(dr):8.3f} "
            f"{dr.max():8.3f}  {shape}"
        )

# The complete graph is uniform under every family (identical variances
# and correlations). Circulant rings are uniform too: equal variances,
# and the worst case over the free correlation erases the remaining
# position dependence. The path concentrates risk toward the far ends.
