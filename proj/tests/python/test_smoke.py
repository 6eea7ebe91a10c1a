import math

import pytest

import morsegpe as mg


def test_table1_row():
    r = mg.minimize_energy(2.0, 1.0)
    assert r.energy_quadratic == pytest.approx(-2.243, abs=0.01)
    assert mg.asymptotic_energy(2.0, 1.0) == pytest.approx(-1.762, abs=0.002)


def test_noninteracting_closed_form():
    r = mg.minimize_energy(3.0, 0.0)
    assert r.alpha_star == pytest.approx(2.5, abs=1e-8)
    assert r.energy_full == pytest.approx(-6.25, abs=1e-8)


def test_errors_carry_kind():
    with pytest.raises(mg.MorseGPEError) as info:
        mg.minimize_energy(2.0, 6.0)
    assert info.value.kind == "NoBoundState"
    with pytest.raises(mg.MorseGPEError) as info:
        mg.critical_lambda(0.4)
    assert info.value.kind == "InvalidArgument"


def test_coupling_round_trip():
    lam = mg.gamma_to_lambda(0.5, 3.0)
    assert mg.lambda_to_gamma(lam, 3.0) == pytest.approx(0.5)


def test_trajectory_arrays():
    d = mg.integrate(2.0, 0.5, 0.6)
    assert d["escaped"]
    assert len(d["t"]) == len(d["x0"]) == len(d["delta"])
    assert d["delta"][0] == pytest.approx(0.4)
    assert d["failure"] is None


def test_threshold_below_classical():
    p, e = mg.threshold_momentum(2.0, 0.5)
    assert p == pytest.approx(0.45, abs=0.02)
    assert p < mg.classical_threshold() == pytest.approx(math.sqrt(2))
    assert e == pytest.approx(mg.initial_energy(2.0, 0.5, 0.4, p))


def test_grid_ground_state():
    e, _ = mg.ground_state_energy(2.0, 0.0, n=2048)
    assert e == pytest.approx(-2.25, abs=1e-6)
