import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jamgame import (
    ExistenceError,
    FadingModel,
    MonotoneCurve,
    equilibrium_strategies,
    fullcsi_equilibrium,
    hughes_narayan_closed_form,
    nocsi_closed_form,
    required_tx_power_curve,
    solve_general_game,
)
from jamgame.mixed_equilibrium import sample_strategy


def test_identity_game():
    eq = solve_general_game(MonotoneCurve.identity(), 1.0, 1.0)
    assert (eq.v, eq.k_x, eq.k_y, eq.payoff) == (1.0, 1.0, 1.0, 0.5)


def test_quadratic_game():
    g = MonotoneCurve.affine(2.0)
    eq = solve_general_game(g, 1.0, 1.0)
    assert eq.v == pytest.approx(1.0)
    assert eq.k_x == pytest.approx(0.5)
    assert eq.payoff == pytest.approx(0.25)


@pytest.mark.parametrize("a,b,c,branch", [
    (2, 1, 1, "S_positive"), (1, 2, 0, "S_positive"),
    (1, 1, 0, "S_zero"), (3, 1, 0.5, "S_negative"),
])
def test_hughes_narayan_cases(a, b, c, branch):
    got = solve_general_game(MonotoneCurve.affine(1.0, c), a, b)
    ref = hughes_narayan_closed_form(a, b, c)
    assert got.branch == branch
    for key in ("v", "k_x", "k_y", "payoff"):
        assert getattr(got, key) == pytest.approx(getattr(ref, key), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0.0, 3.0))
def test_hughes_narayan_property(a, b, c):
    got = solve_general_game(MonotoneCurve.affine(1.0, c), a, b)
    ref = hughes_narayan_closed_form(a, b, c)
    assert got.payoff == pytest.approx(ref.payoff, abs=1e-8)
    assert 0 <= got.payoff <= 1
    assert got.security_x == pytest.approx(got.payoff, abs=1e-8)
    assert got.security_y == pytest.approx(got.payoff, abs=1e-8)


def test_mixture_means_meet_budgets():
    g = MonotoneCurve.affine(1.0, 0.5)
    eq = solve_general_game(g, 3.0, 1.0)
    tx, jam = equilibrium_strategies(eq, g)
    assert tx.mean == pytest.approx(3.0, rel=1e-9)
    assert jam.mean == pytest.approx(1.0, rel=1e-9)
    draws = sample_strategy(jam, 200_000, seed=3)
    assert draws.mean() == pytest.approx(1.0, rel=0.01)


def test_zero_jammer_budget():
    eq = solve_general_game(MonotoneCurve.affine(1.0, 2.0), 1.0, 0.0)
    assert eq.branch == "degenerate"
    assert eq.payoff == pytest.approx(0.5)


def test_bounded_curve_rejected():
    g = MonotoneCurve(np.array([0.0, 1.0]), np.array([1.0, 2.0]), 0.0)
    with pytest.raises(ExistenceError):
        fullcsi_equilibrium(g, 1.0, 1.0)


@pytest.mark.parametrize("P", [15.0, 30.0, 45.0, 80.0])
def test_nocsi_branches_agree(P):
    mu = 1.636342
    ref = nocsi_closed_form(P, 10.0, mu, 10.0)
    got = solve_general_game(MonotoneCurve.affine(mu, mu * 10.0), P, 10.0)
    assert got.payoff == pytest.approx(ref.payoff, abs=1e-10)


def test_fullcsi_json_keys():
    model = FadingModel.exponential(1 / 6)
    curve = required_tx_power_curve(model, 2.0, 10.0, np.linspace(0, 60, 13), extrapolate=True)
    eq = fullcsi_equilibrium(curve, 30.0, 10.0).equilibrium
    assert set(eq.to_dict()) == {"v", "k_x", "k_y", "payoff", "branch", "v0", "S_v0", "curve_digest"}
    assert eq.p_out == pytest.approx(1 - eq.payoff)
    assert len(eq.curve_digest) == 64
