import math

import numpy as np
import pytest

import rmrw


def test_version():
    assert rmrw.version().count(".") == 2


def test_population_potential_matches_frozen_value():
    u = rmrw.population_potential(np.array([2.0]), 1.0, np.array([2.0]), 256)
    assert u == pytest.approx(-1.3672798062631330, rel=1e-13)


def test_gradient_matches_finite_differences():
    theta0 = np.array([1.5, 0.0, -0.5])
    theta = np.array([0.3, -1.2, 2.0])
    g = rmrw.population_gradient(theta0, 4.0, theta)
    h = 1e-5
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (rmrw.population_potential(theta0, 4.0, theta + e) - rmrw.population_potential(theta0, 4.0, theta - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-6, abs=1e-8)
    H = rmrw.population_hessian(theta0, 4.0, theta)
    assert np.allclose(H, H.T)


def test_chain_round_trip():
    data = rmrw.sample_data(np.array([2.0, 0.0]), 50, 7)
    assert data.shape == (50, 2)
    post = rmrw.Posterior(data, 10.0, np.array([2.0, 0.0]))
    assert post.potential(np.zeros(2)) == 0.0
    out = rmrw.run_chain(post, 0.05, 300, 11)
    assert out["states"].shape == (301, 2)
    assert len(out["accepted"]) == 300
    assert 0.0 <= out["acceptance_rate"] <= 1.0
    again = rmrw.run_chain(post, 0.05, 300, 11)
    assert np.array_equal(out["states"], again["states"])


def test_step_size_and_tail_radius():
    assert rmrw.default_step_size(1, 0.0, 1.0, math.exp(-1)) == pytest.approx(7.3593128807e-5, rel=1e-9)
    assert rmrw.tail_radius(1, 0.0, 1.0, math.exp(-1)) == pytest.approx(1 + math.sqrt(2))


def test_poincare_uniform():
    c = rmrw.poincare_constant_1d(0.0, 1.0, [0.0] * 1000)
    assert c == pytest.approx(1 / math.pi**2, rel=0.02)


def test_run_command(tmp_path):
    passed, digest = rmrw.run_command("generate-data", str(tmp_path / "gen"), 5, '{"n": 20}')
    assert passed
    assert len(digest) == 16
    assert (tmp_path / "gen" / "data.csv").exists()
