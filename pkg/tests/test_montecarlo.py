import numpy as np
import pytest

from jamgame import (
    MonotoneCurve,
    equilibrium_strategies,
    estimate_outage,
    estimate_payoff,
    nocsi_curve,
    solve_general_game,
)
from jamgame.montecarlo import BudgetError, SamplingError, atom, deviation_test, uniform
from jamgame.pure_strategies import maximin_outage, minimax_outage
from jamgame.mixed_equilibrium import EquilibriumPlay
from jamgame.rng import mix64, stream_key, uniforms


def _splitmix_reference(state, n):
    out, mask = [], (1 << 64) - 1
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def test_rng_matches_sequential_splitmix():
    key = 12345
    u = uniforms(key, 0, 5)
    ref = [(z >> 11) * 2.0 ** -53 for z in _splitmix_reference(key, 5)]
    assert list(u) == ref


def test_rng_chunk_invariant():
    key = stream_key(9, 1)
    whole = uniforms(key, 0, 1000)
    parts = np.concatenate([uniforms(key, 0, 337), uniforms(key, 337, 663)])
    np.testing.assert_array_equal(whole, parts)
    assert stream_key(9, 1) != stream_key(9, 2)


def test_payoff_chunking_does_not_change_result():
    g = MonotoneCurve.identity()
    a = estimate_payoff(uniform(0, 2), uniform(0, 2), g, 10_000, seed=5)
    b = estimate_payoff(uniform(0, 2), uniform(0, 2), g, 10_000, seed=5, chunk=999)
    assert a == b


def test_identity_game_estimate():
    g = MonotoneCurve.identity()
    eq = solve_general_game(g, 1.0, 1.0)
    tx, jam = equilibrium_strategies(eq, g)
    rep = estimate_payoff(tx, jam, g, 200_000, seed=2, target=eq.payoff)
    assert rep.within(4)


def test_deviations_respect_security():
    g = MonotoneCurve.affine(1.0, 0.5)
    eq = solve_general_game(g, 3.0, 1.0)
    assert all(r.passed for r in deviation_test(eq, g, 3.0, 1.0, n=100_000, seed=1))


def test_budget_violation_detected():
    g = MonotoneCurve.identity()
    eq = solve_general_game(g, 1.0, 1.0)
    with pytest.raises(BudgetError):
        deviation_test(eq, g, 1.0, 1.0, player2={"greedy": atom(2.0)}, n=10)


def test_bad_sampler_reported():
    g = MonotoneCurve.identity()
    with pytest.raises(SamplingError):
        estimate_payoff(lambda u: u[:-1], atom(1.0), g, 10, seed=0)


def test_outage_for_pure_regimes():
    curve = nocsi_curve(1.636342, 10.0)
    r = maximin_outage(curve, 30.0, 10.0)
    assert estimate_outage(r, 100_000, seed=3).within(4)
    r = minimax_outage(curve, 30.0, 10.0)
    assert estimate_outage(r, 100_000, seed=3, curve=curve).within(4)


def test_outage_for_mixed_play():
    g = MonotoneCurve.affine(1.636342, 16.36342)
    eq = solve_general_game(g, 30.0, 10.0)
    play = EquilibriumPlay(eq, *equilibrium_strategies(eq, g))
    rep = estimate_outage(play, 200_000, seed=4)
    assert rep.target == pytest.approx(eq.p_out)
    assert rep.within(4)


def test_mix64_known_value():
    assert int(mix64(np.uint64(0))) == 0
