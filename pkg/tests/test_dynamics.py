import numpy as np
import pytest

from opinet.dynamics import Trajectory, build_A_of_k, simulate, source_pull, step_encoded, steady_state
from opinet.errors import DimensionMismatch, HorizonZero, SingularSystem, WrongRegime, ZeroInnateOpinion
from opinet.network import BiasSpec, NetworkSpec, Source, build_encoded, validate_network
from opinet.synth import random_problem1, random_problem3


def test_zero_is_a_fixed_point(rng):
    spec = random_problem1(rng, 8)
    traj = simulate(spec, np.zeros(8), 20)
    assert not traj.x.any()


def test_isolated_individual_keeps_innate_opinion():
    W = np.array([[0.0, 0.5, 0.0], [0.4, 0.0, 0.0], [0.0, 0.0, 0.0]])
    traj = simulate(NetworkSpec(W), [0.1, 0.9, 0.33], 25)
    assert np.all(traj.x[:, 2] == 0.33)


def test_trajectory_shape(toy12_traj):
    assert toy12_traj.x.shape == (31, 12)
    assert toy12_traj.T == 30
    assert toy12_traj.regime == "ProblemI"


def test_default_horizon(toy12):
    assert simulate(toy12.spec, toy12.x0).T == 14


def test_horizon_zero(toy12):
    with pytest.raises(HorizonZero):
        simulate(toy12.spec, toy12.x0, 0)


def test_x0_shape_checked(toy12):
    with pytest.raises(DimensionMismatch):
        simulate(toy12.spec, np.zeros(5))


def test_regime_override(toy12, rng):
    assert simulate(toy12.spec, toy12.x0, 5, regime="ProblemIII").regime == "ProblemIII"
    with pytest.raises(WrongRegime):
        simulate(random_problem3(rng, 5), np.full(5, 0.5), 5, regime="ProblemI")


def test_step_encoded_matches_simulate(toy12, toy12_traj):
    enc = build_encoded(toy12.spec, toy12.x0)
    x = toy12.x0.copy()
    for k in range(30):
        x = step_encoded(enc.A, enc.W, toy12.x0, x)
        assert np.abs(x - toy12_traj.x[k + 1]).max() < 1e-13


def test_step_encoded_identity():
    x0 = np.array([0.2, 0.7])
    np.testing.assert_array_equal(step_encoded(np.eye(2), np.zeros((2, 2)), x0, np.array([0.5, 0.5])), x0)


def test_step_encoded_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        step_encoded(np.eye(2), np.zeros((3, 3)), np.zeros(2), np.zeros(2))


def test_dd_agrees_with_double(toy12, toy12_traj):
    traj = simulate(toy12.spec, toy12.x0, 30, precision="dd")
    assert traj.precision == "dd"
    assert np.abs(traj.x - toy12_traj.x).max() < 1e-14


def test_boundedness(rng):
    for _ in range(30):
        spec = random_problem3(rng, int(rng.integers(4, 12)))
        traj = simulate(spec, rng.random(spec.n), 50)
        assert traj.x.min() >= 0.0 and traj.x.max() <= 1.0


def test_differences_dd_carry_low_parts(krackhardt):
    traj = simulate(krackhardt.spec, np.linspace(0.1, 0.9, 21), 40, precision="dd")
    hi, lo = traj.differences()
    assert hi.shape == (40, 21) and lo is not None
    assert np.all(np.abs(lo) <= np.spacing(np.abs(hi)) + 1e-300)


def test_A_of_k_non_followers_constant(krackhardt):
    spec = krackhardt.spec
    x0 = np.linspace(0.1, 0.9, 21)
    traj = simulate(spec, x0, 10)
    base = 1.0 - spec.weights.sum(axis=1)
    for k in (0, 5, 10):
        d = np.diag(build_A_of_k(spec, traj.x[k], x0))
        non = [i for i in range(21) if i not in spec.follower_set]
        np.testing.assert_array_equal(d[non], base[non])


def test_A_of_k_manager3_at_source_opinion(krackhardt):
    spec = krackhardt.spec
    x0 = np.full(21, 0.4)
    xk = np.full(21, 0.5)
    d = build_A_of_k(spec, xk, x0)[2, 2]
    expected = 1.0 - spec.weights[2].sum() - 0.13 + 0.13 * 0.5 / 0.4
    assert d == pytest.approx(expected, abs=1e-15)


def test_A_of_k_without_sources():
    W = np.array([[0.0, 0.3], [0.6, 0.0]])
    d = build_A_of_k(NetworkSpec(W), [0.2, 0.3], [0.5, 0.5])
    np.testing.assert_array_equal(np.diag(d), [0.7, 0.4])


def test_A_of_k_zero_innate_follower(krackhardt):
    x0 = np.full(21, 0.5)
    x0[3] = 0.0
    with pytest.raises(ZeroInnateOpinion):
        build_A_of_k(krackhardt.spec, x0, x0)


def test_source_pull_matches_A_of_k(krackhardt):
    x0 = np.linspace(0.05, 0.95, 21)
    xk = np.linspace(0.9, 0.1, 21)
    a = build_A_of_k(krackhardt.spec, xk, x0) @ x0
    np.testing.assert_allclose(source_pull(krackhardt.spec, xk, x0), a, atol=1e-15)


def test_steady_state_without_influence():
    A = np.diag([0.3, 0.6])
    ss = steady_state(A, np.zeros((2, 2)), [0.5, 1.0])
    np.testing.assert_allclose(ss.x_star, [0.15, 0.6])


def test_steady_state_toy12_long_run(toy12):
    enc = build_encoded(toy12.spec, toy12.x0)
    ss = steady_state(enc.A, enc.W, toy12.x0)
    traj = simulate(toy12.spec, toy12.x0, 10000)
    assert np.abs(ss.x_star - traj.x[-1]).max() < 1e-8


def test_steady_state_two_node_consensus():
    W = np.array([[0.0, 0.5], [0.5, 0.0]])
    ss = steady_state(0.5 * np.eye(2), W, [0.2, 0.8])
    assert ss.residual < 1e-12
    # x1 = 0.1 + 0.5 x2, x2 = 0.4 + 0.5 x1
    np.testing.assert_allclose(ss.x_star, [0.4, 0.6])


def test_steady_state_singular():
    with pytest.raises(SingularSystem):
        steady_state(np.eye(2), np.eye(2), [0.1, 0.2])


def test_steady_state_residual_random(rng):
    for _ in range(100):
        spec = random_problem1(rng, int(rng.integers(4, 14)))
        x0 = rng.random(spec.n)
        enc = build_encoded(spec, x0)
        assert steady_state(enc.A, enc.W, x0).residual < 1e-10


def test_trajectory_rejects_ragged_input():
    with pytest.raises(ValueError):
        Trajectory(np.zeros(4), "ProblemI", [])


def test_validated_input_reused(toy12):
    net = validate_network(toy12.spec)
    a = simulate(net, toy12.x0, 5)
    b = simulate(toy12.spec, toy12.x0, 5)
    np.testing.assert_array_equal(a.x, b.x)
    assert a.spec_hash == b.spec_hash


def test_problem2_sources_pull_opinions():
    W = np.array([[0.0, 0.5], [0.5, 0.0]])
    spec = NetworkSpec(W, (Source(1.0, (0, 1)),), {0: BiasSpec.none(0.4), 1: BiasSpec.none(0.4)})
    traj = simulate(spec, [0.0, 0.0], 300)
    # x = 0.5 x + 0.1 * 0 + 0.4 * 1
    np.testing.assert_allclose(traj.x[-1], [0.8, 0.8], atol=1e-12)
