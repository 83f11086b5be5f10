"""Smoke tests for the compiled flip module."""

import math

import numpy as np
import pytest

import flip


def test_state_prep_basics():
    p = flip.state_prep(n=3, d=6, p=2)
    assert p.n_qubits == 3
    assert p.n_params == 18
    assert p.c_min == pytest.approx(-1.0)
    assert p.l1_norm == pytest.approx(1.0)

    psi = flip.run(p, np.zeros(18))
    assert psi.shape == (8,)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-10

    # layer-0 RY(pi) on qubit 1 prepares |010> exactly
    theta = np.zeros(18)
    theta[1] = math.pi
    assert flip.cost(p, theta) == pytest.approx(-1.0)


def test_gradients_agree():
    p = flip.state_prep(n=4, d=3, p=2)
    rng = np.random.default_rng(3)
    theta = rng.uniform(-math.pi, math.pi, p.n_params)
    g = np.asarray(flip.gradient(p, theta))
    gs = np.asarray(flip.gradient_shift(p, theta))
    np.testing.assert_allclose(g, gs, rtol=1e-9, atol=1e-9)

    assert flip.noisy_gradient(p, theta, sigma=0.0, seed=1) == pytest.approx(list(g))
    noisy = np.asarray(flip.noisy_gradient(p, theta, sigma=0.01, seed=1))
    assert not np.allclose(noisy, g)


def test_maxcut_and_fhm_builders():
    q = flip.maxcut(edges=[(0, 1), (0, 2), (1, 2)], n_nodes=3, d=2)
    assert q.l1_norm == pytest.approx(3.0)
    assert q.c_min == pytest.approx(-1.0 / 3.0)
    assert flip.exact_min(q) == pytest.approx(-1.0)

    f = flip.fhm(L=1, U=4.0, d=1)
    assert f.n_params == 5
    assert f.c_min * f.l1_norm == pytest.approx(-2.0)


def test_encode_shapes():
    enc = flip.encode(flip.state_prep(n=3, d=6, p=2))
    assert enc.shape == (18, 5)
    enc_q = flip.encode(flip.maxcut(edges=[(0, 1)], n_nodes=2, d=8))
    assert enc_q.shape == (16, 3)
    enc_f = flip.encode(flip.fhm(L=1, U=5.0, d=1))
    assert enc_f.shape == (5, 13)
    assert enc_f[0, -1] == pytest.approx(0.5)


def test_decoder_roundtrip(tmp_path):
    net = flip.Decoder.init("state_prep", seed=7)
    p = flip.state_prep(n=4, d=4, p=1)
    theta0 = net.initial_params(p)
    assert len(theta0) == p.n_params

    path = tmp_path / "ckpt.json"
    net.save(path)
    net2 = flip.Decoder.load(path)
    assert net2.initial_params(p) == pytest.approx(theta0)


def test_training_improves_loss():
    net = flip.Decoder.init("state_prep", seed=5)
    losses = flip.train(net, n=(1, 2), d=(1, 2), n_problems=10, epochs=60,
                        batch_size=5, seed=11)
    assert len(losses) == 120
    assert losses[-1] < losses[0]
    assert losses[-1] < -0.5

    p = flip.state_prep(n=2, d=2, p=1)
    trace = flip.test_optimize(p, np.asarray(net.initial_params(p)),
                               steps=30, alpha=0.1)
    assert len(trace["cost_norm"]) == 31
    assert trace["delta_c"][-1] < 0.2


def test_training_is_deterministic(tmp_path):
    nets = []
    for _ in range(2):
        net = flip.Decoder.init("maxcut", seed=2)
        flip.train(net, n=(2, 3), d=(1, 2), n_problems=6, epochs=3,
                   batch_size=3, seed=4)
        path = tmp_path / f"ckpt{len(nets)}.json"
        net.save(path)
        nets.append(path.read_bytes())
    assert nets[0] == nets[1]
