import math

import numpy as np
import pytest

import sympflow as sf

EXAMPLE_D = {"d": [{"gamma": 7.834, "delta": 7.2888, "beta": 1, "s": 2, "t": 1}]}


def test_exp_J_matches_generic_exponential():
    J = sf.build_J(EXAMPLE_D)
    for t in (-1.5, 0.3, 2.0):
        E = sf.exp_J(EXAMPLE_D, t)
        assert np.linalg.norm(E - sf.mat_exp(J * t)) <= 1e-9 * np.linalg.norm(E)


def test_nme_doubling_converges_quadratically():
    out = sf.run_sda_nme(np.array([[1.0]]), np.array([[3.0]]))
    assert out["verdict"] == "converged"
    assert abs(out["solution"][0, 0] - (3 + math.sqrt(5)) / 2) < 1e-12


def test_scalar_blowup():
    H = np.array([[0.0, 1.0], [0.0, 0.0]])
    times = sf.singular_times(H, np.array([[-1.0]]), -2.0, 2.0)
    assert len(times) == 1
    assert abs(times[0] - 1.0) < 1e-8
    assert sf.rde_solve(H, np.array([[-1.0]]), 1.0) is None


def test_blowup_period_of_single_d_block():
    inst = sf.make_instance(EXAMPLE_D, 7)
    pred = sf.elementary_limit(inst, "d")
    assert abs(pred["period"] - 11.5248) < 1e-3
    general = sf.general_limit(inst, "plus")
    assert general.mu == 1
    W = general.W_inf(pred["t_star"] + 0.5 * pred["period"])
    assert np.linalg.norm(W - W.conj().T) < 1e-8
    with pytest.raises(sf.PoleError):
        general.W_inf(pred["t_star"])


def test_sda_class_verdicts():
    assert sf.sda_class({"r": [{"lambda": [0.5, 0.1], "size": 1}]})["verdict"] == "quadratic"
    assert sf.sda_class({"e": [{"alpha": 0.2, "beta": 1, "size": 2}]})["verdict"] == "linear"
    assert sf.sda_class(EXAMPLE_D)["verdict"] == "oscillatory"


def test_bad_spec_raises():
    bad = {"d": [{"gamma": 1.0, "delta": 2.0, "beta": 2, "s": 1, "t": 1}]}
    with pytest.raises(sf.SpecError):
        sf.build_J(bad)


def test_kappa_and_determinant():
    for n in range(1, 9):
        assert abs(sf.kappa_numeric(n, 1.0) - sf.kappa(n)) < 1e-9
    assert abs(sf.digamma_det(4, 8) - sf.digamma_det_exact(4, 8)) <= 1e-12 * sf.digamma_det_exact(4, 8)
