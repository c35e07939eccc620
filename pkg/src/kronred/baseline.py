"""Frequency-domain baseline: Kron-reduce at a chosen omega0 and
re-synthesize an RL network from the reduced branch impedances.

The heuristic carries two ambiguities it cannot resolve itself: the
choice of omega0 (taken as an explicit input) and the null-space degree
of freedom when mapping initial branch currents onto the synthesized
topology (exposed as the gamma parameter). It is exact only in special
cases; the point of carrying it here is to quantify where it fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeSynthesizedElementError
from .linalg import min_norm_solution, nullspace
from .network import Edge, Network, build_incidence, partition, validate
from .phasor import admittance, kron_reduce
from .reduction import PStrategy, reduce
from .signals import Excitation
from .simulate import SolverConfig, Trajectory, simulate_reduced

# Off-diagonal admittance entries below this relative level are treated
# as absent branches of the reduced graph.
_BRANCH_TOL = 1e-12


@dataclass(frozen=True)
class SynthesizedNetwork:
    """RL network over the boundary nodes, recovered from Yr at omega0."""

    network: Network
    omega0: float


def heuristic_reduce(
    network: Network, omega0: float, allow_unphysical: bool = False
) -> SynthesizedNetwork:
    """Steps: admittance at omega0 -> Schur reduction -> per reduced
    branch, impedance z = -1/Yr[m,n] split as r = Re(z), l = Im(z)/omega0.

    For the 3-node reduced triangle edges are oriented cyclically (so the
    ones vector spans the incidence null space, matching the classical
    delta convention); otherwise orientation is lexicographic. Synthesis
    can produce r < 0 or l <= 0; that raises unless allow_unphysical.
    """
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    reduced = kron_reduce(admittance(network, omega0))
    nodes = list(reduced.boundary_nodes)
    nb = len(nodes)
    Yr = reduced.Yr
    scale = np.max(np.abs(Yr))
    pairs = [
        (m, n)
        for m in range(nb)
        for n in range(m + 1, nb)
        if abs(Yr[m, n]) > _BRANCH_TOL * scale
    ]
    cyclic = nb == 3 and len(pairs) == 3
    if cyclic:
        oriented = [(0, 1), (1, 2), (2, 0)]
    else:
        oriented = pairs
    edges = []
    for m, n in oriented:
        z = -1.0 / Yr[m, n]
        r = float(z.real)
        l = float(z.imag) / omega0
        edge_id = f"d_{nodes[m]}_{nodes[n]}"
        if (r < 0 or l <= 0) and not allow_unphysical:
            raise NegativeSynthesizedElementError(edge_id, r, l)
        edges.append(Edge(edge_id, nodes[m], nodes[n], r, l))
    synth = Network(nodes=tuple(nodes), edges=tuple(edges), boundary=tuple(nodes))
    # validate() enforces r >= 0 and l > 0, so it can only run when the
    # synthesized elements are physical
    if all(e.r >= 0 and e.l > 0 for e in edges):
        synth = validate(synth)
    return SynthesizedNetwork(network=synth, omega0=omega0)


def map_initial_condition(Br: np.ndarray, i1_0, gamma: float = 0.0, gamma_vector=None):
    """Branch currents of the synthesized network matching the boundary
    injections i1(0), plus the gamma-scaled null-space component.

    The minimum-norm solve pins the component in range(Br^T); gamma fills
    the null(Br) ambiguity. When null(Br) is spanned by the ones vector
    (a single cycle), gamma multiplies the plain ones vector; otherwise
    it scales the first orthonormal null-basis vector, and gamma_vector
    may supply a full coefficient list instead.
    """
    Br = np.asarray(Br, dtype=float)
    base = min_norm_solution(Br, np.asarray(i1_0, dtype=float))
    E = Br.shape[1]
    basis = nullspace(Br)
    if basis.shape[1] == 0:
        return base
    if gamma_vector is not None:
        coeffs = np.asarray(gamma_vector, dtype=float)
        if coeffs.size != basis.shape[1]:
            raise ValueError(
                f"gamma_vector needs {basis.shape[1]} coefficients, got {coeffs.size}"
            )
        return base + basis @ coeffs
    if basis.shape[1] == 1 and np.allclose(basis[:, 0], np.mean(basis[:, 0])):
        # single cycle: the null space is the constant vector, use gamma * 1
        return base + gamma * np.ones(E)
    return base + gamma * basis[:, 0]


def draw_gammas(seed, count: int = 5, low: float = -5.0, high: float = 5.0):
    """Seeded uniform gamma draws, matching the reference experiment."""
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=count)


def run_baseline_sweep(
    network: Network,
    omega0: float,
    excitation: Excitation,
    f0_full,
    gammas,
    cfg: SolverConfig,
    allow_unphysical: bool = False,
):
    """One synthesized-network simulation per gamma.

    The synthesized network has no interior nodes, so its exact reduced
    model is just its own edge dynamics. Returns (synthesized, list of
    (gamma, Trajectory)).
    """
    synth = heuristic_reduce(network, omega0, allow_unphysical=allow_unphysical)
    inc = build_incidence(network)
    i1_0 = inc.b1.astype(float) @ np.asarray(f0_full, dtype=float)
    Br = build_incidence(synth.network).matrix
    model = reduce(synth.network, PStrategy.TREE_ELIMINATION)
    runs = []
    for gamma in gammas:
        f0_delta = map_initial_condition(Br, i1_0, float(gamma))
        runs.append((float(gamma), simulate_reduced(model, excitation, f0_delta, cfg)))
    return synth, runs
