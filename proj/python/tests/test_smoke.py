import numpy as np
import pytest

import spdpeg


def flr_problem(d=10, seed=1):
    s = spdpeg.synthesize(f"fused-signal:d={d},n=100,noise=0.1,seed={seed}")
    train, test = spdpeg.split(s["data"], 0.8, 0)
    p = spdpeg.Problem(
        spdpeg.fused_matrix(d),
        r1=spdpeg.ProxSpec(spdpeg.RegKind.L1, 1e-3),
        r2=spdpeg.ProxSpec(spdpeg.RegKind.L1, 1e-2),
    )
    return p, train, test


def test_prox_l1_soft_threshold():
    out = spdpeg.prox_l1(np.array([1.0, -0.2, 0.5, -2.0]), 0.3)
    np.testing.assert_allclose(out, [0.7, 0.0, 0.2, -1.7], atol=1e-15)


def test_prox_squared_l2_shrinks():
    v = np.array([2.0, -4.0])
    np.testing.assert_allclose(spdpeg.prox_squared_l2(v, 1.0, 1.0), v / 2.0)


def test_libsvm_round_trip():
    text = "+1 1:0.5 3:-2\n-1 2:1\n"
    data = spdpeg.parse_libsvm(text)
    assert len(data) == 2 and data.dimension == 3
    assert spdpeg.parse_libsvm(spdpeg.to_libsvm(data)) == data
    np.testing.assert_array_equal(data.labels(), [1.0, -1.0])


def test_bad_libsvm_raises():
    with pytest.raises(spdpeg.InputError):
        spdpeg.parse_libsvm("+1 0:1\n")


def test_dense_dataset_and_split():
    x = np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 4.0], [0.0, 0.0], [5.0, 0.0]])
    y = np.array([1.0, -1.0, 1.0, -1.0, 1.0])
    data = spdpeg.Dataset.from_dense(x, y)
    np.testing.assert_array_equal(data.features(), x)
    train, test = spdpeg.split(data, 0.8, 3)
    assert (len(train), len(test)) == (4, 1)


def test_penalty_matrices():
    F = spdpeg.fused_matrix(4)
    assert F.shape == (3, 4)
    np.testing.assert_allclose(F.matvec([1.0, 2.0, 4.0, 8.0]), [-1.0, -2.0, -4.0])
    G = spdpeg.graph_matrix(3, [(0, 2, 0.5)])
    np.testing.assert_allclose(G.matvec([1.0, 0.0, 3.0]), [-1.0])
    # sigma_max(F^T F) of the path difference operator is below 4
    assert 3.0 < F.sigma_max() < 4.0


def test_schedule():
    lt = spdpeg.compute_L_tilde(1.0, 2.0, 1.0, 0.0)
    assert lt == pytest.approx(16.0)
    c0 = spdpeg.step_size(spdpeg.Regime.Convex, 0.0, lt, 0)
    assert c0 == pytest.approx(1.0 / 17.0)
    t = 20
    w = sum(spdpeg.average_weight(spdpeg.Regime.SCNonUniform, k, t) for k in range(t + 1))
    assert w == pytest.approx(1.0, abs=1e-14)


def test_gradient_matches_finite_difference():
    p, train, _ = flr_problem()
    x = np.linspace(-0.5, 0.5, 10)
    g = p.gradient(train, x)
    h = 1e-6
    for j in range(10):
        e = np.zeros(10)
        e[j] = h
        fd = (p.loss_value(train, x + e) - p.loss_value(train, x - e)) / (2 * h)
        assert abs(fd - g[j]) <= 1e-6


@pytest.mark.parametrize("solver", ["spdpeg", "eg-full", "slinadmm"])
def test_solvers_decrease_objective(solver):
    p, train, test = flr_problem()
    c = spdpeg.SolverConfig.for_problem(p, train)
    c.max_iters = 2000
    c.eval_every = 500
    c.seed = 5
    r = spdpeg.run(p, train, test, c, solver)
    assert r["x"].shape == (10,) and r["z"].shape == (9,) and r["lambda"].shape == (9,)
    assert [t["iteration"] for t in r["trace"]] == [500, 1000, 1500, 2000]
    assert r["trace"][-1]["objective"] < p.objective(train, np.zeros(10))
    again = spdpeg.run(p, train, test, c, solver)
    np.testing.assert_array_equal(r["x"], again["x"])


def test_check_lemma1():
    out = spdpeg.check_lemma1(steps=100, references=3)
    assert out["ok"] and out["checks"] == 300 and out["min_relative_slack"] >= -1e-8
