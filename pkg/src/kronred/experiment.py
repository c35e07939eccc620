"""Built-in wye-delta benchmark experiment.

A three-branch wye network (one interior center node) with fixed RL
parameters is driven by sinusoidal or step voltages and simulated with
the exact reduced model, the independent full-model solver, and the
frequency-domain baseline with randomized initial-current ambiguity.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

from .baseline import draw_gammas, run_baseline_sweep
from .compare import compare_trajectories
from .network import Edge, Network, validate
from .reduction import PStrategy, reduce
from .signals import Constant, Excitation, Sinusoid, Step
from .simulate import SolverConfig, simulate_dae_oracle, simulate_reduced, trajectory_to_csv

WYE_R = (0.98, 0.99, 0.58)          # ohms
WYE_L = (0.55, 0.64, 0.77)          # henries
WYE_F0 = (-5.0, -5.0, 10.0)         # amps, satisfies KCL at the center
SIN_FREQ_HZ = 1.5
SIN_AMPLITUDE_V = 120.0
SIN_PHASES_DEG = (0.0, 30.0, -30.0)
STEP_VALUES_V = (120.0, 100.0, 110.0)
OMEGA0 = 2.0 * math.pi * SIN_FREQ_HZ
N_GAMMAS = 5


def wye_network() -> Network:
    edges = tuple(
        Edge(f"e{k + 1}", str(k + 1), "4", WYE_R[k], WYE_L[k]) for k in range(3)
    )
    return validate(Network(nodes=("1", "2", "3", "4"), edges=edges, boundary=("1", "2", "3")))


def sinusoid_excitation() -> Excitation:
    return Excitation(
        signals={
            str(k + 1): Sinusoid(SIN_AMPLITUDE_V, SIN_FREQ_HZ, math.radians(SIN_PHASES_DEG[k]))
            for k in range(3)
        }
    )


def step_excitation() -> Excitation:
    return Excitation(
        signals={str(k + 1): Step(STEP_VALUES_V[k], 0.0) for k in range(3)}
    )


def zero_excitation_for_boundary() -> Excitation:
    return Excitation(signals={str(k + 1): Constant(0.0) for k in range(3)})


def resolve_seed(flag_seed=None, manifest_seed=None, default=0):
    """Seed priority: CLI flag, then KRONRED_SEED, then manifest, then default."""
    if flag_seed is not None:
        return int(flag_seed)
    env = os.environ.get("KRONRED_SEED")
    if env is not None:
        return int(env)
    if manifest_seed is not None:
        return int(manifest_seed)
    return default


def run_experiment(
    which: str,
    out_dir=None,
    seed: int = 0,
    cfg: SolverConfig = None,
    strategy: PStrategy = PStrategy.ORTHONORMAL_NULL_BASIS,
) -> dict:
    """Run one excitation variant end to end.

    Returns a summary dict; when out_dir is given also writes one CSV per
    run (dae, reduced, baseline_gamma_<k>) plus summary.json there.
    Trajectories are attached under the non-serialized key
    "_trajectories" for in-process use.
    """
    if which == "sinusoid":
        excitation = sinusoid_excitation()
    elif which == "step":
        excitation = step_excitation()
    else:
        raise ValueError(f"unknown experiment {which!r}, expected 'sinusoid' or 'step'")
    if cfg is None:
        cfg = SolverConfig(dt=1e-4, t_end=10.0, record_stride=10)
    network = wye_network()
    f0 = np.array(WYE_F0)
    oracle = simulate_dae_oracle(network, excitation, f0, cfg)
    reduced_traj = simulate_reduced(reduce(network, strategy), excitation, f0, cfg)
    gammas = draw_gammas(seed, N_GAMMAS)
    synth, baseline_runs = run_baseline_sweep(network, OMEGA0, excitation, f0, gammas, cfg)

    i_channels = [f"i_{n}" for n in ("1", "2", "3")]
    exact_cmp = compare_trajectories(reduced_traj, oracle, channels=i_channels)
    baseline_summaries = []
    initial_max_dev = float(
        np.max(np.abs(reduced_traj.select(i_channels).data[0] - oracle.select(i_channels).data[0]))
    )
    for gamma, traj in baseline_runs:
        cmp = compare_trajectories(traj, oracle, channels=i_channels)
        initial_max_dev = max(
            initial_max_dev,
            float(np.max(np.abs(traj.select(i_channels).data[0] - oracle.select(i_channels).data[0]))),
        )
        baseline_summaries.append(
            {
                "gamma": gamma,
                "steady_state_error_rel": cmp["steady_rel"],
                "transient_max_error_rel": cmp["max_rel"],
            }
        )
    steady_errors = [b["steady_state_error_rel"] for b in baseline_summaries]
    transient_errors = [b["transient_max_error_rel"] for b in baseline_summaries]
    observations = {
        "initial_injections_coincide": initial_max_dev <= 1e-9,
        "reduced_matches_oracle": exact_cmp["max_rel"] <= 1e-6,
    }
    if which == "sinusoid":
        observations["baselines_align_in_steady_state"] = all(e <= 1e-3 for e in steady_errors)
        observations["baseline_transients_vary"] = any(
            t >= 10.0 * max(s, 1e-300) for t, s in zip(transient_errors, steady_errors)
        )
    else:
        observations["baselines_differ_from_oracle_in_steady_state"] = all(
            e >= 1e-2 for e in steady_errors
        )
        pairwise = [
            compare_trajectories(traj, baseline_runs[0][1], channels=i_channels)["steady_rel"]
            for _, traj in baseline_runs[1:]
        ]
        summary_pairwise = max(pairwise) if pairwise else 0.0
        observations["baselines_coincide_with_each_other_in_steady_state"] = (
            summary_pairwise <= 1e-2
        )
    summary = {
        "experiment": which,
        "seed": int(seed),
        "solver": {"dt_s": cfg.dt, "t_end_s": cfg.t_end, "record_stride": cfg.record_stride},
        "omega0_rad_s": OMEGA0,
        "reduced_vs_oracle": exact_cmp,
        "initial_injection_max_deviation": initial_max_dev,
        "baseline": baseline_summaries,
        "observations": observations,
        "synthesized_delta": {
            e.id: {"r_ohm": e.r, "l_henry": e.l} for e in synth.network.edges
        },
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        trajectory_to_csv(oracle, out / "dae.csv")
        trajectory_to_csv(reduced_traj, out / "reduced.csv")
        for k, (_, traj) in enumerate(baseline_runs):
            trajectory_to_csv(traj, out / f"baseline_gamma_{k}.csv")
        with open(out / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2)
    summary["_trajectories"] = {
        "dae": oracle,
        "reduced": reduced_traj,
        "baseline": baseline_runs,
    }
    return summary
