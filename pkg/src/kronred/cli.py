"""Command-line front end.

Exit codes: 0 success, 2 input/validation error, 3 model-applicability
error (non-homogeneous network, unphysical synthesized element),
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .baseline import draw_gammas, run_baseline_sweep
from .compare import compare_trajectories
from .errors import (
    InputFormatError,
    KronredError,
    NegativeSynthesizedElementError,
    NetworkValidationError,
    NotHomogeneousError,
)
from .experiment import resolve_seed, run_experiment
from .network import load_network
from .phasor import Phasor, admittance, kron_reduce, phasor_solve, recover_interior_phasors
from .reduction import (
    PStrategy,
    homogeneous_reduce,
    load_model,
    model_to_dict,
    reduce,
    save_model,
)
from .signals import load_excitation
from .simulate import (
    SolverConfig,
    simulate_dae_oracle,
    simulate_homogeneous,
    simulate_reduced,
    trajectory_from_csv,
    trajectory_to_csv,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODEL = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _diagnostic(exc):
    name = type(exc).__name__
    if name.endswith("Error"):
        name = name[: -len("Error")]
    payload = {"error": name, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


def _strategy(name):
    return PStrategy(name)


def cmd_validate(args):
    load_network(args.network)
    print(f"{args.network}: valid")
    return EXIT_OK


def cmd_reduce(args):
    network = load_network(args.network)
    model = reduce(network, _strategy(args.p_strategy))
    if args.out:
        save_model(model, args.out)
        print(f"wrote {args.out}")
    else:
        json.dump(model_to_dict(model), sys.stdout, indent=2)
        print()
    return EXIT_OK


def _load_manifest(path):
    manifest_path = Path(path)
    with open(manifest_path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(
                f"malformed JSON in {path} (line {exc.lineno}, column {exc.colno})"
            ) from exc
    known = {"network", "excitation", "f0", "solver", "strategy", "seed", "out_dir"}
    unknown = set(obj) - known
    if unknown:
        raise InputFormatError(f"unknown manifest keys: {sorted(unknown)}")
    for key in ("network", "excitation"):
        if key not in obj:
            raise InputFormatError(f"manifest is missing {key!r}")
    base = manifest_path.parent
    solver = obj.get("solver", {})
    cfg = SolverConfig(
        dt=float(solver.get("dt_s", 1e-4)),
        t_end=float(solver.get("t_end_s", 10.0)),
        record_stride=int(solver.get("record_stride", 1)),
    )
    network = load_network(base / obj["network"])
    excitation = load_excitation(base / obj["excitation"])
    f0 = np.asarray(obj.get("f0", [0.0] * len(network.edges)), dtype=float)
    if f0.size != len(network.edges):
        raise InputFormatError(
            f"f0 length {f0.size} != edge count {len(network.edges)}"
        )
    return {
        "network": network,
        "excitation": excitation,
        "f0": f0,
        "cfg": cfg,
        "strategy": PStrategy(obj.get("strategy", "nullbasis")),
        "seed": obj.get("seed"),
        "out_dir": base / obj.get("out_dir", "."),
    }


def cmd_simulate(args):
    m = _load_manifest(args.manifest)
    out_dir = Path(args.out_dir) if args.out_dir else m["out_dir"]
    out_dir.mkdir(parents=True, exist_ok=True)
    network, excitation, f0, cfg = m["network"], m["excitation"], m["f0"], m["cfg"]
    written = []
    if args.method == "reduced":
        model = load_model(args.model) if args.model else reduce(network, m["strategy"])
        traj = simulate_reduced(model, excitation, f0, cfg)
        path = out_dir / "reduced.csv"
        trajectory_to_csv(traj, path)
        written.append(path)
    elif args.method == "dae":
        traj = simulate_dae_oracle(network, excitation, f0, cfg)
        path = out_dir / "dae.csv"
        trajectory_to_csv(traj, path)
        written.append(path)
    elif args.method == "homogeneous":
        hmodel = homogeneous_reduce(network, tol=args.homogeneity_tol)
        from .network import build_incidence

        i1_0 = build_incidence(network).b1.astype(float) @ f0
        traj = simulate_homogeneous(hmodel, excitation, i1_0, cfg)
        path = out_dir / "homogeneous.csv"
        trajectory_to_csv(traj, path)
        written.append(path)
    elif args.method == "baseline":
        if args.omega0 is None:
            raise InputFormatError("--omega0 is required for the baseline method")
        if args.gamma:
            gammas = [float(g) for g in args.gamma]
        else:
            gammas = list(draw_gammas(resolve_seed(args.seed, m["seed"])))
        _, runs = run_baseline_sweep(
            network,
            args.omega0,
            excitation,
            f0,
            gammas,
            cfg,
            allow_unphysical=args.allow_unphysical,
        )
        summary = []
        oracle = trajectory_from_csv(args.oracle) if args.oracle else None
        for k, (gamma, traj) in enumerate(runs):
            path = out_dir / f"baseline_gamma_{k}.csv"
            trajectory_to_csv(traj, path)
            written.append(path)
            entry = {"gamma": gamma}
            if oracle is not None:
                cmp = compare_trajectories(traj, oracle)
                entry["steady_state_error_rel"] = cmp["steady_rel"]
                entry["transient_max_error_rel"] = cmp["max_rel"]
            summary.append(entry)
        path = out_dir / "baseline_summary.json"
        with open(path, "w") as fh:
            json.dump(summary, fh, indent=2)
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_compare(args):
    a = trajectory_from_csv(args.traj_a)
    b = trajectory_from_csv(args.traj_b)
    channels = args.channels.split(",") if args.channels else None
    summary = compare_trajectories(a, b, channels=channels, from_time=args.from_time)
    json.dump(summary, sys.stdout, indent=2)
    print()
    return EXIT_OK


def _parse_phasor(text):
    try:
        mag, _, deg = text.partition("@")
        return Phasor(float(mag), math.radians(float(deg)))
    except ValueError as exc:
        raise InputFormatError(f"bad phasor {text!r}, expected MAG@DEG") from exc


def _complex_json(z):
    return {"re": float(z.real), "im": float(z.imag)}


def cmd_phasor(args):
    network = load_network(args.network)
    reduced = kron_reduce(admittance(network, args.omega))
    result = {
        "omega_rad_s": args.omega,
        "boundary_nodes": list(reduced.boundary_nodes),
        "Yr": [[_complex_json(z) for z in row] for row in reduced.Yr],
    }
    if args.v1:
        v1 = [_parse_phasor(s) for s in args.v1]
        if len(v1) != len(reduced.boundary_nodes):
            raise InputFormatError(
                f"need {len(reduced.boundary_nodes)} boundary phasors, got {len(v1)}"
            )
        i1 = phasor_solve(reduced, v1)
        v0 = recover_interior_phasors(reduced, v1)
        result["i1"] = [
            dict(_complex_json(p.to_complex()), magnitude=p.magnitude, phase_rad=p.phase)
            for p in i1
        ]
        result["v0"] = {
            node: dict(_complex_json(p.to_complex()), magnitude=p.magnitude, phase_rad=p.phase)
            for node, p in zip(reduced.interior_nodes, v0)
        }
    json.dump(result, sys.stdout, indent=2)
    print()
    return EXIT_OK


def cmd_paper_experiment(args):
    cfg = SolverConfig(dt=args.dt, t_end=args.t_end, record_stride=args.record_stride)
    summary = run_experiment(
        args.which,
        out_dir=args.out_dir,
        seed=resolve_seed(args.seed),
        cfg=cfg,
    )
    summary.pop("_trajectories", None)
    json.dump(summary, sys.stdout, indent=2)
    print()
    return EXIT_OK


def build_parser():
    parser = _Parser(
        prog="kronred",
        description="Exact time-domain Kron reduction of voltage-actuated RL networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network JSON file")
    p.add_argument("network")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reduce", help="build the exact reduced model")
    p.add_argument("network")
    p.add_argument("--p-strategy", choices=[s.value for s in PStrategy], default="nullbasis")
    p.add_argument("--out", help="output model JSON path (default: stdout)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", help="run one simulation method from a manifest")
    p.add_argument("manifest")
    p.add_argument("--method", choices=["reduced", "dae", "homogeneous", "baseline"], required=True)
    p.add_argument("--model", help="pre-built reduced-model JSON (method=reduced)")
    p.add_argument("--omega0", type=float, help="synthesis frequency rad/s (method=baseline)")
    p.add_argument("--gamma", action="append", help="explicit gamma value (repeatable)")
    p.add_argument("--allow-unphysical", action="store_true")
    p.add_argument("--seed", type=int, help="gamma-draw seed (overrides KRONRED_SEED)")
    p.add_argument("--oracle", help="reference trajectory CSV for the baseline summary")
    p.add_argument("--homogeneity-tol", type=float, default=1e-9)
    p.add_argument("--out-dir", help="override the manifest's output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="summarize deviations between two trajectory CSVs")
    p.add_argument("traj_a")
    p.add_argument("traj_b")
    p.add_argument("--channels", help="comma-separated channel names")
    p.add_argument("--from-time", type=float, default=0.0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("phasor", help="steady-state Kron reduction at one frequency")
    p.add_argument("network")
    p.add_argument("--omega", type=float, required=True, help="rad/s")
    p.add_argument(
        "--v1",
        action="append",
        help="boundary voltage phasor MAG@DEG, repeat per boundary node in order",
    )
    p.set_defaults(func=cmd_phasor)

    p = sub.add_parser("paper-experiment", help="run the built-in wye-delta benchmark")
    p.add_argument("--which", choices=["sinusoid", "step"], required=True)
    p.add_argument("--out-dir", default="experiment_out")
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--record-stride", type=int, default=10)
    p.set_defaults(func=cmd_paper_experiment)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotHomogeneousError, NegativeSynthesizedElementError) as exc:
        _diagnostic(exc)
        return EXIT_MODEL
    except (NetworkValidationError, InputFormatError, FileNotFoundError) as exc:
        _diagnostic(exc)
        return EXIT_INPUT
    except KronredError as exc:
        _diagnostic(exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
