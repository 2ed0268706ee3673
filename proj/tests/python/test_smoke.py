import math

import pytest

import twobsde as tb


def test_conjugates():
    band = tb.GeneratorSpec.gamma_band(-1.0, 2.0)
    assert band.F(3.0) == pytest.approx(2.0)
    assert band.H(3.0) is None
    assert band.hhat(-2.0) == pytest.approx(-0.5)
    assert tb.GeneratorSpec.g_range(1.0, 4.0).F(5.0) is None
    grid = [i * 1e-3 - 1.0 for i in range(3001)]
    assert tb.conjugate_numeric(band, 3.0, grid) == pytest.approx(2.0, abs=1e-9)


def test_uncertain_volatility_call():
    sg = tb.SpaceGrid(0.0, 12.0, 1201)
    sol = tb.solve_2bsde(tb.GeneratorSpec.g_range(1.0, 4.0), tb.Payoff.call(0.0), 100, sg, [1.0, 4.0])
    y0 = sol["y"][0][600]
    assert abs(y0 - 2.0 / math.sqrt(2.0 * math.pi)) <= 5e-3
    assert sol["a_star"][0][600] == 4.0


def test_pde_matches_2bsde():
    sg = tb.SpaceGrid(0.0, 8.0, 161)
    spec = tb.GeneratorSpec.g_range(1.0, 4.0)
    g = tb.Payoff("mixed", lambda x: max(x, 0.0) - 2.0 * max(x - 1.0, 0.0))
    v = tb.solve_pde(spec, g, 20, sg, [1.0, 4.0])
    y = tb.solve_2bsde(spec, g, 20, sg, [1.0, 4.0])["y"]
    assert max(abs(a - b) for ra, rb in zip(v, y) for a, b in zip(ra, rb)) <= 1e-6


def test_bsde_heat_square():
    sol = tb.solve_bsde(tb.GeneratorSpec.single_vol(1.0), 1.0, tb.Payoff.square(), 100, tb.SpaceGrid(0.0, 8.0, 801))
    assert abs(sol["y"][0][400] - 1.0) <= 5e-3


def test_monte_carlo():
    mean, se = tb.mc_terminal_value(tb.Payoff.square(), 2.0, 100000, 7)
    assert abs(mean - 2.0) <= 3.0 * se


def test_counterexample_is_reproducible():
    kw = dict(n_paths=2000, n_steps=400, t_stop=0.9, seed=5, checkpoints=[0.25, 0.5])
    a = tb.simulate_counterexample(**kw)
    b = tb.simulate_counterexample(**kw)
    assert a["csv"] == b["csv"]
    assert all(c["within_tolerance"] for c in a["checkpoints"])


def test_errors_are_mapped():
    with pytest.raises(ValueError):
        tb.GeneratorSpec.g_range(4.0, 1.0)
    with pytest.raises(ValueError):
        tb.SpaceGrid(0.0, 1.0, 10)
