import numpy as np
import pytest

from opinet.approx import (
    FOLLOWER,
    NON_FOLLOWER,
    UNKNOWN,
    build_window_set,
    default_p,
    infer_problem3,
    partial_exactness_check,
)
from opinet.dynamics import Trajectory, simulate
from opinet.errors import EmptyWindowSet
from opinet.metrics import sample_x0
from opinet.synth import random_problem2, random_problem3


@pytest.fixture(scope="module")
def krack_traj(krackhardt):
    x0 = sample_x0(krackhardt.simulation.seed, 0, 21)
    return simulate(krackhardt.spec, x0, 40, precision="dd")


def test_krackhardt_window_set(krack_traj):
    ws = build_window_set(krack_traj, 2, 30)
    assert 2 in ws.candidates
    assert ws.solutions[2].rank_P == 21


def test_krackhardt_partial_exactness(krackhardt, krack_traj):
    res = infer_problem3(krack_traj, 2, 30)
    assert res.followers == {2, 3, 18, 19}
    rep = partial_exactness_check(res, krackhardt.spec)
    assert rep.passed
    assert rep.max_non_follower_error < 1e-12
    # follower rows are only approximate
    assert rep.row_errors[[2, 3, 18, 19]].max() > 1e-6


def test_steady_state_data_gives_empty_window_set():
    traj = Trajectory(np.full((40, 5), 0.6), "ProblemIII", [0.5])
    with pytest.raises(EmptyWindowSet):
        infer_problem3(traj, 2, 20)


def test_window_too_short(krack_traj):
    with pytest.raises(ValueError):
        build_window_set(krack_traj, 2, 22)


def test_problem1_data_flags_followers(toy12):
    traj = simulate(toy12.spec, toy12.x0, 40, regime="ProblemIII")
    res = infer_problem3(traj, 2, 30)
    assert res.followers == {0, 1, 2, 3}
    rep = partial_exactness_check(res, toy12.spec)
    assert rep.max_non_follower_error < 1e-8


def test_no_bias_data_all_non_followers(rng):
    spec = random_problem2(rng, 8)
    traj = simulate(spec, rng.random(8), 40)
    res = infer_problem3(traj, 2, 30)
    assert set(res.follower_flags) == {NON_FOLLOWER}
    # sources act through the diagonal, which is dropped
    assert np.abs(res.W_breve - spec.weights).max() < 1e-8


def test_single_window_is_unknown(rng):
    spec = random_problem3(rng, 6)
    traj = simulate(spec, rng.uniform(0.05, 1, 6), 30)
    res = infer_problem3(traj, 1, 20)
    # with one window only a self-weight can prove a row is a follower
    for i, f in enumerate(res.follower_flags):
        assert f == (FOLLOWER if res.diag_residual[i] > 1e-7 else UNKNOWN)
        if f == FOLLOWER:
            assert i in spec.follower_set
    non = [i for i in range(6) if i not in spec.follower_set]
    assert all(res.follower_flags[i] == UNKNOWN for i in non)


def test_negative_weights_clamped(krack_traj):
    res = infer_problem3(krack_traj, 2, 30)
    assert res.W_breve.min() >= 0.0
    assert not np.diag(res.W_breve).any()


def test_default_p_is_clamped(krack_traj):
    p = default_p(krack_traj, 2)
    assert 23 <= p <= min(2 + 63, krack_traj.T - 2)


def test_classification_soundness(rng):
    for _ in range(40):
        spec = random_problem3(rng, int(rng.integers(6, 12)))
        traj = simulate(spec, rng.uniform(0.05, 1, spec.n), 4 * spec.n + 4)
        try:
            res = infer_problem3(traj, 2)
        except EmptyWindowSet:
            continue
        flagged = {i for i, f in enumerate(res.follower_flags) if f == NON_FOLLOWER}
        assert not flagged & spec.follower_set
        assert FOLLOWER not in [res.follower_flags[i] for i in range(spec.n) if i not in spec.follower_set]


def test_to_dict_uses_one_based_labels(krack_traj):
    doc = infer_problem3(krack_traj, 2, 30).to_dict()
    assert doc["followers"] == [3, 4, 19, 20]
    assert doc["follower_flags"]["3"] == FOLLOWER
