"""Classical sinusoidal-steady-state Kron reduction.

Admittance assembly Y = B (R + jwL)^-1 B^T, interior-block invertibility
conditions, Schur reduction to the boundary nodes, and recovery of the
eliminated interior voltages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .linalg import schur_complement, _check_block_conditioning
from .network import Network, build_incidence, partition


def _wrap_phase(phase: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(phase, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class Phasor:
    """Amplitude/phase pair for x(t) = magnitude * cos(w t + phase)."""

    magnitude: float
    phase: float

    def __post_init__(self):
        if self.magnitude < 0:
            object.__setattr__(self, "magnitude", -self.magnitude)
            object.__setattr__(self, "phase", self.phase + math.pi)
        object.__setattr__(self, "phase", _wrap_phase(self.phase))

    @classmethod
    def from_complex(cls, z: complex) -> "Phasor":
        return cls(abs(z), math.atan2(z.imag, z.real) if z != 0 else 0.0)

    def to_complex(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class AdmittanceMatrix:
    """Complex nodal admittance with boundary-first partition."""

    Y: np.ndarray
    omega: float
    n_interior: int
    boundary_nodes: tuple
    interior_nodes: tuple


@dataclass(frozen=True)
class KronReducedAdmittance:
    """Boundary-only admittance plus the interior-voltage recovery map."""

    Yr: np.ndarray            # (Nb, Nb)
    recovery_map: np.ndarray  # (N0, Nb): v0 = recovery_map @ v1
    omega: float
    boundary_nodes: tuple
    interior_nodes: tuple


def admittance(network: Network, omega: float) -> AdmittanceMatrix:
    """Nodal admittance Y = B (R + jwL)^-1 B^T at frequency omega (rad/s)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    inc = build_incidence(network)
    B = inc.matrix.astype(float)
    y_edge = 1.0 / (network.r_vector() + 1j * omega * network.l_vector())
    Y = (B * y_edge[None, :]) @ B.T
    return AdmittanceMatrix(
        Y=Y,
        omega=omega,
        n_interior=len(inc.interior_nodes),
        boundary_nodes=inc.boundary_nodes,
        interior_nodes=inc.interior_nodes,
    )


def check_interior_invertibility(network: Network) -> dict:
    """Sufficient conditions for the interior admittance block to be
    invertible: c1 = all resistances positive, c2 = all inductances
    positive. c2 always holds for a validated network."""
    return {
        "c1": all(e.r > 0 for e in network.edges),
        "c2": all(e.l > 0 for e in network.edges),
    }


def kron_reduce(adm: AdmittanceMatrix) -> KronReducedAdmittance:
    """Schur-eliminate the interior block of Y.

    Returns the boundary admittance Yr = Y11 - Y10 Y00^-1 Y10^T and the
    recovery map -Y00^-1 Y10^T reconstructing interior voltages from
    boundary voltages.
    """
    n = adm.Y.shape[0]
    n0 = adm.n_interior
    nb = n - n0
    interior = list(range(nb, n))
    Yr = schur_complement(adm.Y, interior)
    if n0 == 0:
        recovery = np.zeros((0, nb), dtype=complex)
    else:
        Y00 = adm.Y[nb:, nb:]
        Y10 = adm.Y[:nb, nb:]
        _check_block_conditioning(Y00)
        recovery = -np.linalg.solve(Y00, Y10.T)
    return KronReducedAdmittance(
        Yr=Yr,
        recovery_map=recovery,
        omega=adm.omega,
        boundary_nodes=adm.boundary_nodes,
        interior_nodes=adm.interior_nodes,
    )


def phasor_solve(reduced: KronReducedAdmittance, v1):
    """Boundary current phasors i1 = Yr v1 for boundary voltage phasors v1."""
    v1 = list(v1)
    if len(v1) != reduced.Yr.shape[0]:
        raise DimensionMismatchError(
            f"expected {reduced.Yr.shape[0]} boundary phasors, got {len(v1)}"
        )
    v1bar = np.array([p.to_complex() for p in v1])
    i1bar = reduced.Yr @ v1bar
    return [Phasor.from_complex(z) for z in i1bar]


def recover_interior_phasors(reduced: KronReducedAdmittance, v1):
    """Interior voltage phasors v0 = recovery_map @ v1."""
    v1bar = np.array([p.to_complex() for p in v1])
    v0bar = reduced.recovery_map @ v1bar
    return [Phasor.from_complex(z) for z in v0bar]


def full_network_admittance_partition(network: Network, omega: float):
    """Convenience: admittance together with the partitioned incidence."""
    inc = build_incidence(network)
    return admittance(network, omega), partition(inc, network)
