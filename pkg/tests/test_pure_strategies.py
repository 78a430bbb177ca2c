import numpy as np
import pytest

from jamgame import (
    CurveRangeError,
    FadingModel,
    maximin_outage,
    minimax_outage,
    nocsi_curve,
    nonintelligent_outage,
    peak_report,
    required_tx_power_curve,
)
from jamgame.pure_strategies import minimax_objective, peak_outage

EXP = FadingModel.exponential(1 / 6)
AFFINE = nocsi_curve(1.636342, 10.0)


def test_peak_outage_step():
    assert peak_outage(2.0, 2.0) == 0
    assert peak_outage(1.99, 2.0) == 1
    assert peak_report(EXP, 2.0, 10.0, 30.0, 10.0).p_out == 1
    assert peak_report(EXP, 2.0, 10.0, 40.0, 10.0).p_out == 0


def test_maximin_fraction():
    r = maximin_outage(AFFINE, 16.363420, 10.0)
    assert r.p_t == pytest.approx(0.5, rel=1e-6)
    assert r.p_out == pytest.approx(0.5, rel=1e-6)
    assert r.p_j == 0


def test_minimax_bounds():
    r = minimax_outage(AFFINE, 30.0, 10.0)
    f, _, _ = minimax_objective(AFFINE, 30.0, 10.0, np.geomspace(30, 3e4, 500))
    assert r.p_out <= f.min() + 1e-3
    assert r.p_out >= maximin_outage(AFFINE, 30.0, 10.0).p_out


def test_minimax_zero_jammer():
    r = minimax_outage(AFFINE, 30.0, 0.0)
    assert r.p_out == 0.0


def test_minimax_needs_curve_range():
    curve = required_tx_power_curve(EXP, 2.0, 10.0, [0.0, 1.0])
    with pytest.raises(CurveRangeError):
        minimax_outage(curve, 40.0, 10.0)


def test_nonintelligent_below_maximin():
    a = nonintelligent_outage(EXP, 2.0, 10.0, 30.0, 10.0).p_out
    b = maximin_outage(required_tx_power_curve(EXP, 2.0, 10.0, [10.0]), 30.0, 10.0).p_out
    assert 0 <= a <= b


def test_report_validation():
    with pytest.raises(ValueError):
        maximin_outage(AFFINE, -1.0, 10.0)
