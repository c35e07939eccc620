"""Time integration and steady-state extraction.

A single fixed-step classical RK4 core integrates linear time-invariant
systems y' = A y + b(t), with the forcing pre-evaluated on the half-step
stage grid so runs are deterministic and fast. Three front ends build
the (A, b) pair differently:

* simulate_reduced — the projected reduced ODE (pseudoflow state);
* simulate_dae_oracle — the full constrained model, converted to an ODE
  by solving for interior voltages at every stage (index-1 reduction);
  deliberately independent of the projection machinery;
* simulate_homogeneous — the injection-space model for R = alpha L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    ConstraintDriftError,
    InconsistentInitialConditionError,
    InputFormatError,
    InsufficientWindowError,
)
from .network import Network, build_incidence, partition
from .phasor import Phasor
from .reduction import HomogeneousReducedModel, ReducedModel, embed_initial
from .signals import Excitation

# Constraint-drift guard for the DAE oracle, relative to the flow scale.
DRIFT_TOL = 1e-7


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step RK4 configuration."""

    dt: float = 1e-4
    t_end: float = 10.0
    record_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end <= self.dt:
            raise ValueError("t_end must exceed dt")
        if self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled named channels over time."""

    times: np.ndarray
    data: np.ndarray      # (n_samples, n_channels)
    channels: tuple

    def channel(self, name):
        try:
            j = self.channels.index(name)
        except ValueError:
            raise KeyError(f"no channel {name!r}") from None
        return self.data[:, j]

    def channels_with_prefix(self, prefix):
        return tuple(c for c in self.channels if c.startswith(prefix))

    def select(self, names):
        idx = [self.channels.index(n) for n in names]
        return Trajectory(self.times, self.data[:, idx], tuple(names))


def _rk4_lti(A, forcing_stages, y0, dt, n_steps, record_stride):
    """Integrate y' = A y + b(t) with classical RK4.

    forcing_stages holds b on the half-step grid t_k = k*dt/2,
    shape (2*n_steps + 1, dim). Returns (record_steps, states) where
    states[i] is y at step record_steps[i].
    """
    y = np.asarray(y0, dtype=float).copy()
    record_steps = list(range(0, n_steps + 1, record_stride))
    if record_steps[-1] != n_steps:
        record_steps.append(n_steps)
    out = np.empty((len(record_steps), y.size))
    out[0] = y
    # The system is LTI, so one RK4 step collapses to y <- M y + g_n with
    # constant matrices; precomputing g_n for every step vectorizes all
    # per-stage work out of the loop. Same classical RK4 arithmetic.
    dim = y.size
    I = np.eye(dim)
    h2 = 0.5 * dt
    h6 = dt / 6.0
    A1 = dt * A
    A2 = A1 @ A1
    M = I + A1 + A2 / 2.0 + (A2 @ A1) / 6.0 + (A2 @ A2) / 24.0
    F0 = h6 * (I + A1 + A2 / 2.0 + (A1 @ A2) / 4.0)
    Fm = h6 * (4.0 * I + 2.0 * A1 + A2 / 2.0)
    F1 = h6 * I
    g = (
        forcing_stages[0:-1:2] @ F0.T
        + forcing_stages[1::2] @ Fm.T
        + forcing_stages[2::2] @ F1.T
    )
    # record_steps ends at n_steps, so next_rec hits len() only after the
    # final iteration.
    next_rec = 1
    Mdot = M.dot
    for i in range(n_steps):
        y = Mdot(y) + g[i]
        if i + 1 == record_steps[next_rec]:
            out[next_rec] = y
            next_rec += 1
    return np.asarray(record_steps), out


def _stage_grid(cfg):
    return np.arange(2 * cfg.n_steps + 1) * (0.5 * cfg.dt)


def simulate_reduced(
    model: ReducedModel, excitation: Excitation, f0, cfg: SolverConfig
) -> Trajectory:
    """Integrate the reduced ODE from a consistent full-order initial flow.

    Channels: fhat_<k> for the pseudoflows and i_<node> for the boundary
    injections i1 = Bhat fhat.
    """
    fhat0 = embed_initial(model.P, np.asarray(f0, dtype=float))
    A = np.linalg.solve(model.Lhat, -model.Rhat)
    Bu = np.linalg.solve(model.Lhat, model.Bhat.T)
    v1 = excitation.evaluate(model.boundary_nodes, _stage_grid(cfg))
    forcing = v1 @ Bu.T
    steps, fhat = _rk4_lti(A, forcing, fhat0, cfg.dt, cfg.n_steps, cfg.record_stride)
    i1 = fhat @ model.Bhat.T
    channels = tuple(f"fhat_{k}" for k in range(model.order)) + tuple(
        f"i_{n}" for n in model.boundary_nodes
    )
    return Trajectory(steps * cfg.dt, np.hstack([fhat, i1]), channels)


def simulate_dae_oracle(
    network: Network, excitation: Excitation, f0, cfg: SolverConfig
) -> Trajectory:
    """Integrate the full constrained model directly.

    At every RK4 stage the interior voltages solve
    (B0 L^-1 B0^T) v0 = B0 L^-1 (R f - B1^T v1(t)), which keeps
    B0 f' = 0; the SPD system matrix is Cholesky-factored once. The
    interior current balance is drift-checked at every recorded sample.
    Channels: f_<edge>, i_<node> (boundary), v0_<node> (interior).
    """
    incidence = build_incidence(network)
    mats = partition(incidence, network)
    f0 = np.asarray(f0, dtype=float)
    drift0 = np.max(np.abs(mats.B0 @ f0)) if mats.B0.size else 0.0
    if drift0 > DRIFT_TOL * max(np.max(np.abs(f0), initial=0.0), 1e-300):
        raise InconsistentInitialConditionError(drift0)
    linv = 1.0 / mats.l
    B0 = mats.B0.astype(float)
    B1 = mats.B1.astype(float)
    n0 = B0.shape[0]
    v1 = excitation.evaluate(incidence.boundary_nodes, _stage_grid(cfg))
    if n0 > 0:
        B0L = B0 * linv[None, :]
        chol = cho_factor(B0L @ B0.T)
        G = cho_solve(chol, B0 * (linv * mats.r)[None, :])   # v0 = G f + H v1
        H = -cho_solve(chol, B0L @ B1.T)
        A = linv[:, None] * (B0.T @ G - np.diag(mats.r))
        forcing = v1 @ (linv[:, None] * (B0.T @ H + B1.T)).T
    else:
        G = np.zeros((0, len(mats.l)))
        H = np.zeros((0, B1.shape[0]))
        A = linv[:, None] * (-np.diag(mats.r))
        forcing = v1 @ (linv[:, None] * B1.T).T
    steps, f = _rk4_lti(A, forcing, f0, cfg.dt, cfg.n_steps, cfg.record_stride)
    # Drift check on the algebraic constraint at each recorded sample.
    if n0 > 0:
        drift = np.max(np.abs(f @ B0.T), axis=1)
        scale = np.max(np.abs(f), axis=1)
        bad = drift > DRIFT_TOL * np.maximum(scale, 1e-300)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ConstraintDriftError(steps[i] * cfg.dt, float(drift[i]))
    i1 = f @ B1.T
    v0 = f @ G.T + v1[2 * steps] @ H.T if n0 > 0 else np.zeros((len(steps), 0))
    channels = (
        tuple(f"f_{e}" for e in incidence.edge_ids)
        + tuple(f"i_{n}" for n in incidence.boundary_nodes)
        + tuple(f"v0_{n}" for n in incidence.interior_nodes)
    )
    return Trajectory(steps * cfg.dt, np.hstack([f, i1, v0]), channels)


def simulate_homogeneous(
    model: HomogeneousReducedModel, excitation: Excitation, i1_0, cfg: SolverConfig
) -> Trajectory:
    """Integrate di1/dt = -alpha i1 + Lred v1 from the initial injections."""
    i1_0 = np.asarray(i1_0, dtype=float)
    A = -model.alpha * np.eye(len(i1_0))
    v1 = excitation.evaluate(model.boundary_nodes, _stage_grid(cfg))
    forcing = v1 @ model.Lred.T
    steps, i1 = _rk4_lti(A, forcing, i1_0, cfg.dt, cfg.n_steps, cfg.record_stride)
    channels = tuple(f"i_{n}" for n in model.boundary_nodes)
    return Trajectory(steps * cfg.dt, i1, channels)


def extract_steady_phasors(
    traj: Trajectory, freq: float, periods: int = 4, channels=None
):
    """Single-frequency fit over the trailing `periods` periods.

    Least-squares fit of a*cos(wt) + b*sin(wt) + c per channel, exact for
    a settled pure tone regardless of sample/period commensurability.
    Returns (phasors, residuals): one Phasor per channel and the relative
    non-fundamental energy left after removing the fitted tone, a small
    value indicating the window is genuinely in steady state.
    """
    if channels is None:
        channels = traj.channels
    duration = traj.times[-1] - traj.times[0]
    window = periods / freq
    if duration < (periods + 2) / freq:
        raise InsufficientWindowError(
            f"trajectory covers {duration * freq:.2f} periods, need {periods + 2}"
        )
    mask = traj.times >= traj.times[-1] - window * (1 + 1e-12)
    t = traj.times[mask]
    w = 2.0 * math.pi * freq
    design = np.column_stack([np.cos(w * t), np.sin(w * t), np.ones_like(t)])
    phasors = []
    residuals = []
    for name in channels:
        x = traj.channel(name)[mask]
        coef, _, _, _ = np.linalg.lstsq(design, x, rcond=None)
        a, b, _ = coef
        mag = math.hypot(a, b)
        phase = math.atan2(-b, a) if mag > 0 else 0.0
        phasors.append(Phasor(mag, phase))
        fit = design[:, :2] @ coef[:2]
        norm = np.linalg.norm(x)
        residuals.append(float(np.linalg.norm(x - fit - coef[2]) / max(norm, 1e-300)))
    return phasors, residuals


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write `t,<channels>` rows with shortest round-trip float formatting."""
    with open(path, "w") as fh:
        fh.write("t," + ",".join(traj.channels) + "\n")
        for t, row in zip(traj.times, traj.data):
            fh.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def trajectory_from_csv(path) -> Trajectory:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "t":
            raise InputFormatError(f"{path}: first CSV column must be 't'")
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    if not rows:
        raise InputFormatError(f"{path}: no samples")
    arr = np.asarray(rows)
    if arr.shape[1] != len(header):
        raise InputFormatError(f"{path}: ragged CSV")
    return Trajectory(arr[:, 0], arr[:, 1:], tuple(header[1:]))
