"""Weighted undirected graphs, Laplacians, and spectral decompositions.

Graphs here are simple, connected, and carry strictly positive edge
weights. The Laplacian of such a graph is symmetric positive
semidefinite with a one-dimensional kernel spanned by the all-ones
vector, which is what every downstream covariance and risk computation
relies on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedGraph,
    DuplicateEdge,
    EigenFailure,
    InvalidRadius,
    KernelMismatch,
    NonpositiveWeight,
    SelfLoop,
)

Edge = tuple[int, int, float]

# |lambda_1| <= KERNEL_TOL * max(1, lambda_n) is snapped to zero; anything
# larger (or a second eigenvalue below it) means the kernel is wrong.
KERNEL_TOL = 1e-10


@dataclass(frozen=True)
class WeightedGraph:
    """Validated simple connected graph with positive edge weights.

    Edges are stored canonically as (i, j, w) with i < j, sorted.
    Instances are immutable and safe to share between threads.
    """

    n: int
    edges: tuple[Edge, ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [[i, j, w] for (i, j, w) in self.edges]}

    @staticmethod
    def from_dict(data: dict) -> "WeightedGraph":
        return build_graph(int(data["n"]), [tuple(e) for e in data["edges"]])


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition L = Q diag(eigenvalues) Q^T of a graph Laplacian.

    Eigenvalues ascend, eigenvalues[0] == 0.0 exactly after the kernel
    check, and the first column of Q is 1/sqrt(n) entrywise.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambda_n(self) -> float:
        return float(self.eigenvalues[-1])


@dataclass(frozen=True)
class IncidenceFactors:
    """Signed incidence matrix R (n x m) and diagonal weights W (m x m).

    Satisfies R @ W @ R.T == laplacian(g) entrywise to 1e-12.
    """

    R: np.ndarray
    W: np.ndarray


def build_graph(n: int, edges) -> WeightedGraph:
    """Validate and canonicalize an edge list into a WeightedGraph.

    Parameters
    ----------
    n : int
        Number of nodes, at least 2.
    edges : iterable of (i, j, w)
        Undirected edges with node indices in [0, n) and weights w > 0.

    Raises
    ------
    SelfLoop, DuplicateEdge, NonpositiveWeight, DisconnectedGraph
        If the edge list violates the corresponding requirement.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got n={n}")
    seen: dict[tuple[int, int], float] = {}
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise SelfLoop(f"self-loop at node {i}")
        if w <= 0:
            raise NonpositiveWeight(f"edge ({i},{j}) has weight {w} <= 0")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed more than once")
        seen[key] = w

    # connectivity by union-find over the positive-weight edges
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (i, j) in seen:
        parent[find(i)] = find(j)
    roots = {find(v) for v in range(n)}
    if len(roots) != 1:
        raise DisconnectedGraph(f"graph has {len(roots)} components")

    canonical = tuple(sorted((i, j, w) for (i, j), w in seen.items()))
    return WeightedGraph(n=n, edges=canonical)


def generate_topology(kind: str, n: int, w: float = 1.0, p: int = 1) -> WeightedGraph:
    """Build one of the reference topologies: complete, path, or cycle.

    The cycle is circulant: node i connects to i+-1, ..., i+-p (mod n),
    which requires 1 <= p <= floor((n-1)/2) so no pair is doubled.
    """
    if kind == "complete":
        edges = [(i, j, w) for i in range(n) for j in range(i + 1, n)]
    elif kind == "path":
        edges = [(i, i + 1, w) for i in range(n - 1)]
    elif kind == "cycle":
        if not (1 <= p <= (n - 1) // 2):
            raise InvalidRadius(f"cycle radius p={p} outside 1..{(n - 1) // 2} for n={n}")
        edges = [(i, (i + d) % n, w) for i in range(n) for d in range(1, p + 1)]
    else:
        raise ValueError(f"unknown topology kind {kind!r}")
    return build_graph(n, edges)


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Dense graph Laplacian: diagonal = weighted degree, off-diagonal = -w."""
    L = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L


def spectral_decompose(L: np.ndarray) -> Spectrum:
    """Eigendecompose a graph Laplacian and normalize its kernel mode.

    Uses the dense symmetric solver (tridiagonalization + QL/QR); the
    matrices here are small, so determinism and accuracy win over
    scalability. The smallest eigenvalue is snapped to exactly zero when
    it lies within KERNEL_TOL * max(1, lambda_n).

    Raises
    ------
    EigenFailure
        If the solver does not converge.
    KernelMismatch
        If lambda_1 is not numerically zero, or lambda_2 is (kernel
        multiplicity > 1, i.e. a disconnected Laplacian).
    """
    L = np.asarray(L, dtype=float)
    try:
        lam, Q = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    tol = KERNEL_TOL * max(1.0, float(lam[-1]))
    if abs(lam[0]) > tol:
        raise KernelMismatch(f"lambda_1 = {lam[0]:.3e} not within {tol:.1e} of zero")
    if lam[1] <= tol:
        raise KernelMismatch(f"lambda_2 = {lam[1]:.3e} ~ 0: kernel multiplicity > 1")
    lam = lam.copy()
    lam[0] = 0.0
    # the kernel is span{1}: pin q_1 to the positive constant vector
    n = L.shape[0]
    Q = Q.copy()
    Q[:, 0] = 1.0 / np.sqrt(n)
    lam.flags.writeable = False
    Q.flags.writeable = False
    return Spectrum(eigenvalues=lam, eigenvectors=Q)


def spectrum_of(g: WeightedGraph) -> Spectrum:
    """Convenience: spectral_decompose(laplacian(g))."""
    return spectral_decompose(laplacian(g))


def incidence_factorization(g: WeightedGraph) -> IncidenceFactors:
    """Factor the Laplacian as R W R^T with one signed column per edge."""
    R = np.zeros((g.n, g.m))
    weights = np.zeros(g.m)
    for k, (i, j, w) in enumerate(g.edges):
        R[i, k] = 1.0
        R[j, k] = -1.0
        weights[k] = w
    return IncidenceFactors(R=R, W=np.diag(weights))


def load_graph(path: str) -> WeightedGraph:
    """Read a graph from a JSON file: {"n": int, "edges": [[i, j, w], ...]}."""
    with open(path) as fh:
        return WeightedGraph.from_dict(json.load(fh))


def save_graph(g: WeightedGraph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(g.to_dict(), fh)
