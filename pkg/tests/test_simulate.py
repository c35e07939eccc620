import math

import numpy as np
import pytest

from kronred import (
    Constant,
    Excitation,
    PStrategy,
    Piecewise,
    Sinusoid,
    SolverConfig,
    Step,
    Trajectory,
    build_incidence,
    compare_trajectories,
    extract_steady_phasors,
    reduce,
    simulate_dae_oracle,
    simulate_homogeneous,
    simulate_reduced,
    zero_excitation,
)
from kronred.errors import (
    InconsistentInitialConditionError,
    InputFormatError,
    InsufficientWindowError,
)
from kronred.reduction import homogeneous_reduce
from kronred.signals import excitation_from_dict, excitation_to_dict
from kronred.simulate import trajectory_from_csv, trajectory_to_csv

from conftest import (
    make_balanced_wye,
    make_net_a,
    make_net_b,
    make_wye,
    random_connected_network,
    random_consistent_flow,
)


class TestSignals:
    def test_sinusoid_at_zero(self):
        assert np.isclose(Sinusoid(120.0, 1.5, 0.0)(0.0), 120.0)

    def test_sinusoid_with_phase(self):
        s = Sinusoid(120.0, 1.5, math.radians(30.0))
        assert np.isclose(s(0.0), 120.0 * math.cos(math.radians(30.0)))
        assert np.isclose(s(0.0), 103.92304845413263)

    def test_step_closed_on_left(self):
        s = Step(value=5.0, t_step=1.0)
        assert np.array_equal(s([0.0, 0.999, 1.0, 2.0]), [0.0, 0.0, 5.0, 5.0])

    def test_constant(self):
        assert np.array_equal(Constant(3.0)([0.0, 7.0]), [3.0, 3.0])

    def test_piecewise_hold(self):
        p = Piecewise(((1.0, 2.0), (3.0, -1.0)))
        assert np.array_equal(p([0.5, 1.0, 2.0, 3.0, 4.0]), [0.0, 2.0, 2.0, -1.0, -1.0])

    def test_piecewise_rejects_unordered(self):
        with pytest.raises(ValueError):
            Piecewise(((2.0, 1.0), (1.0, 0.0)))

    def test_excitation_stacks_in_node_order(self):
        exc = Excitation({"a": Constant(1.0), "b": Constant(2.0)})
        out = exc.evaluate(("b", "a", "c"), [0.0, 1.0])
        assert np.array_equal(out, [[2.0, 1.0, 0.0], [2.0, 1.0, 0.0]])

    def test_json_round_trip(self):
        exc = Excitation(
            {
                "1": Sinusoid(120.0, 1.5, math.radians(30.0)),
                "2": Step(100.0, 0.0),
                "3": Constant(7.0),
                "4": Piecewise(((0.5, 1.0),)),
            }
        )
        clone = excitation_from_dict(excitation_to_dict(exc))
        t = np.linspace(0.0, 2.0, 50)
        assert np.allclose(
            clone.evaluate(("1", "2", "3", "4"), t), exc.evaluate(("1", "2", "3", "4"), t)
        )

    def test_unknown_signal_type_rejected(self):
        with pytest.raises(InputFormatError):
            excitation_from_dict({"signals": {"1": {"type": "ramp", "slope": 1.0}}})

    def test_unknown_key_rejected(self):
        with pytest.raises(InputFormatError):
            excitation_from_dict({"signals": {"1": {"type": "constant", "value_v": 1, "x": 2}}})


class TestReducedSimulation:
    def test_single_edge_exponential_decay(self):
        # one r = l = 1 edge shorted at both ends: f(t) = f0 exp(-t)
        net = make_net_a(r=1.0, l=1.0)
        model = reduce(net)
        cfg = SolverConfig(dt=1e-3, t_end=1.0)
        traj = simulate_reduced(model, zero_excitation(), [2.0], cfg)
        assert np.max(np.abs(traj.channel("fhat_0") - 2.0 * np.exp(-traj.times))) <= 1e-8

    def test_zero_equilibrium(self, wye):
        model = reduce(wye)
        traj = simulate_reduced(model, zero_excitation(), np.zeros(3), SolverConfig(dt=1e-3, t_end=0.5))
        assert np.max(np.abs(traj.data)) == 0.0

    def test_initial_injections(self, wye):
        model = reduce(wye, PStrategy.TREE_ELIMINATION)
        traj = simulate_reduced(
            model, zero_excitation(), [-5.0, -5.0, 10.0], SolverConfig(dt=1e-3, t_end=0.1)
        )
        i0 = [traj.channel(f"i_{n}")[0] for n in ("1", "2", "3")]
        assert np.allclose(i0, [-5.0, -5.0, 10.0])

    def test_inconsistent_initial_flow_rejected(self, wye):
        model = reduce(wye)
        with pytest.raises(InconsistentInitialConditionError):
            simulate_reduced(model, zero_excitation(), [1.0, 0.0, 0.0], SolverConfig(dt=1e-3, t_end=0.1))

    def test_injections_conserve_current(self, rng):
        for _ in range(5):
            net = random_connected_network(rng)
            model = reduce(net)
            f0 = random_consistent_flow(net, rng)
            exc = Excitation({n: Sinusoid(10.0, 2.0, 0.0) for n in net.boundary[:1]})
            traj = simulate_reduced(model, exc, f0, SolverConfig(dt=1e-3, t_end=0.5))
            inj = np.column_stack([traj.channel(c) for c in traj.channels_with_prefix("i_")])
            scale = max(np.max(np.abs(inj)), 1e-300)
            assert np.max(np.abs(inj.sum(axis=1))) <= 1e-9 * scale

    def test_unforced_energy_nonincreasing(self, rng):
        for _ in range(5):
            net = random_connected_network(rng)
            model = reduce(net)
            f0 = random_consistent_flow(net, rng)
            traj = simulate_reduced(model, zero_excitation(), f0, SolverConfig(dt=1e-3, t_end=0.5))
            fhat = np.column_stack([traj.channel(c) for c in traj.channels_with_prefix("fhat_")])
            energy = np.einsum("ij,jk,ik->i", fhat, model.Lhat, fhat)
            assert np.all(np.diff(energy) <= 1e-12 * max(energy[0], 1e-300))


class TestDaeOracle:
    def test_dc_steady_state_series(self):
        # unit source across two series branches: f -> 1/(r1+r2), interior
        # voltage -> the divider value r2/(r1+r2) of the source
        net = make_net_b(r1=1.0, l1=0.3, r2=3.0, l2=0.7)
        exc = Excitation({"1": Constant(1.0)})
        traj = simulate_dae_oracle(net, exc, [0.0, 0.0], SolverConfig(dt=1e-3, t_end=8.0))
        assert np.isclose(traj.channel("f_e1")[-1], 0.25, atol=1e-9)
        assert np.isclose(traj.channel("f_e2")[-1], 0.25, atol=1e-9)
        assert np.isclose(traj.channel("v0_3")[-1], 0.75, atol=1e-9)

    def test_initial_injections(self, wye):
        traj = simulate_dae_oracle(
            wye, zero_excitation(), [-5.0, -5.0, 10.0], SolverConfig(dt=1e-3, t_end=0.1)
        )
        i0 = [traj.channel(f"i_{n}")[0] for n in ("1", "2", "3")]
        assert np.allclose(i0, [-5.0, -5.0, 10.0])

    def test_inconsistent_initial_flow_rejected(self, wye):
        with pytest.raises(InconsistentInitialConditionError):
            simulate_dae_oracle(wye, zero_excitation(), [1.0, 0.0, 0.0], SolverConfig(dt=1e-3, t_end=0.1))

    def test_no_interior_network(self):
        net = make_net_a(r=1.0, l=1.0)
        traj = simulate_dae_oracle(net, zero_excitation(), [2.0], SolverConfig(dt=1e-3, t_end=1.0))
        assert np.max(np.abs(traj.channel("f_e1") - 2.0 * np.exp(-traj.times))) <= 1e-8

    def test_matches_reduced_model(self, wye, rng):
        exc = Excitation(
            {
                "1": Sinusoid(120.0, 1.5, 0.0),
                "2": Sinusoid(120.0, 1.5, math.radians(30.0)),
                "3": Sinusoid(120.0, 1.5, math.radians(-30.0)),
            }
        )
        f0 = [-5.0, -5.0, 10.0]
        cfg = SolverConfig(dt=1e-3, t_end=1.0)
        oracle = simulate_dae_oracle(wye, exc, f0, cfg)
        for strategy in PStrategy:
            traj = simulate_reduced(reduce(wye, strategy), exc, f0, cfg)
            report = compare_trajectories(traj, oracle)
            assert set(report["channels"]) == {"i_1", "i_2", "i_3"}
            assert report["max_rel"] <= 1e-9


class TestHomogeneousSimulation:
    def test_matches_oracle(self):
        net = make_balanced_wye(r=2.0, l=1.0)
        hm = homogeneous_reduce(net)
        exc = Excitation({"1": Sinusoid(5.0, 1.0, 0.0), "2": Step(3.0, 0.2)})
        f0 = [1.0, 1.0, -2.0]
        cfg = SolverConfig(dt=1e-3, t_end=2.0)
        i1_0 = build_incidence(net).b1.astype(float) @ f0
        traj = simulate_homogeneous(hm, exc, i1_0, cfg)
        oracle = simulate_dae_oracle(net, exc, f0, cfg)
        report = compare_trajectories(traj, oracle)
        assert report["max_rel"] <= 1e-9

    def test_unforced_decay_rate(self):
        hm = homogeneous_reduce(make_balanced_wye(r=2.0, l=1.0))
        traj = simulate_homogeneous(hm, zero_excitation(), [1.0, 0.0, -1.0], SolverConfig(dt=1e-3, t_end=1.0))
        expected = np.exp(-2.0 * traj.times)
        assert np.max(np.abs(traj.channel("i_1") - expected)) <= 1e-8


class TestSteadyPhasors:
    def test_pure_tone_recovered(self):
        freq = 1.5
        t = np.arange(0, 8.0, 1e-3)
        x = 3.0 * np.cos(2 * math.pi * freq * t + 0.7) + 0.25
        traj = Trajectory(t, x[:, None], ("x",))
        (p,), (res,) = extract_steady_phasors(traj, freq)
        assert abs(p.magnitude - 3.0) <= 1e-9
        assert abs(p.phase - 0.7) <= 1e-9
        assert res <= 1e-9

    def test_incommensurate_sampling(self):
        freq = 1.5
        t = np.arange(0, 7.3, 9.7e-4)
        x = 2.0 * np.cos(2 * math.pi * freq * t - 1.2)
        (p,), _ = extract_steady_phasors(Trajectory(t, x[:, None], ("x",)), freq)
        assert abs(p.magnitude - 2.0) <= 1e-9
        assert abs(p.phase + 1.2) <= 1e-9

    def test_window_too_short(self):
        t = np.linspace(0, 1.0, 100)
        traj = Trajectory(t, np.zeros((100, 1)), ("x",))
        with pytest.raises(InsufficientWindowError):
            extract_steady_phasors(traj, freq=1.0, periods=4)

    def test_residual_flags_transient(self):
        freq = 2.0
        t = np.arange(0, 10.0, 1e-3)
        x = np.cos(2 * math.pi * freq * t) + np.exp(-0.05 * t)
        _, (res,) = extract_steady_phasors(Trajectory(t, x[:, None], ("x",)), freq)
        assert res > 1e-3


class TestCompare:
    def test_identical_trajectories(self, wye):
        model = reduce(wye)
        traj = simulate_reduced(model, zero_excitation(), [-5.0, -5.0, 10.0], SolverConfig(dt=1e-3, t_end=0.5))
        report = compare_trajectories(traj, traj)
        assert report["max_abs"] == 0.0
        assert report["max_rel"] == 0.0
        assert report["steady_rel"] == 0.0

    def test_known_offset(self):
        t = np.linspace(0, 1, 11)
        a = Trajectory(t, np.ones((11, 1)), ("x",))
        b = Trajectory(t, 1.5 * np.ones((11, 1)), ("x",))
        report = compare_trajectories(a, b)
        assert np.isclose(report["max_abs"], 0.5)
        assert np.isclose(report["max_rel"], 0.5 / 1.5)

    def test_restricts_to_common_channels(self):
        t = np.linspace(0, 1, 5)
        a = Trajectory(t, np.zeros((5, 2)), ("x", "y"))
        b = Trajectory(t, np.zeros((5, 2)), ("y", "z"))
        report = compare_trajectories(a, b)
        assert tuple(report["channels"]) == ("y",)


class TestCsvRoundTrip:
    def test_bit_exact(self, wye, tmp_path):
        model = reduce(wye)
        traj = simulate_reduced(
            model,
            Excitation({"1": Sinusoid(120.0, 1.5, 0.0)}),
            [-5.0, -5.0, 10.0],
            SolverConfig(dt=1e-3, t_end=0.2),
        )
        path = tmp_path / "traj.csv"
        trajectory_to_csv(traj, path)
        clone = trajectory_from_csv(path)
        assert clone.channels == traj.channels
        assert np.array_equal(clone.times, traj.times)
        assert np.array_equal(clone.data, traj.data)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x\n0.0,1.0\n")
        with pytest.raises(InputFormatError):
            trajectory_from_csv(path)


class TestRk4Accuracy:
    def test_fourth_order_convergence(self):
        # halving dt should shrink the error by about 2^4
        net = make_wye()
        model = reduce(net, PStrategy.TREE_ELIMINATION)
        exc = Excitation({"1": Sinusoid(120.0, 1.5, 0.0), "2": Constant(50.0)})
        f0 = [-5.0, -5.0, 10.0]

        def final_state(dt):
            traj = simulate_reduced(model, exc, f0, SolverConfig(dt=dt, t_end=1.0))
            return traj.data[-1, : model.order]

        ref = final_state(1.25e-4)
        e1 = np.linalg.norm(final_state(2e-3) - ref)
        e2 = np.linalg.norm(final_state(1e-3) - ref)
        assert 12.0 <= e1 / e2 <= 20.0
