import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jamgame import FadingModel, IntegrationError, discretize, expectation, quantile

EXP = FadingModel.exponential(1 / 6)


def test_exponential_moments():
    assert expectation(EXP, lambda h: h) == pytest.approx(6.0, rel=1e-9)
    assert expectation(EXP, lambda h: np.ones_like(h)) == pytest.approx(1.0, rel=1e-10)
    assert EXP.integrate(lambda h: h * h) == pytest.approx(72.0, rel=1e-9)


def test_truncation_point():
    assert EXP.h_max == pytest.approx(6 * 12 * math.log(10), rel=1e-6)
    assert EXP.sf(EXP.h_max) == pytest.approx(1 - EXP.truncation_quantile, rel=1e-9)


def test_fixed_rule_matches_adaptive():
    f = lambda h: np.log1p(h / (1 + 0.3 * h))
    assert EXP.integrate(f, 0.2, 40.0) == pytest.approx(expectation(EXP, f, 0.2, 40.0), rel=1e-12)


def test_point_mass():
    m = FadingModel.point_mass(2.0)
    assert expectation(m, lambda h: h ** 2) == 4.0
    assert m.integrate(lambda h: h, 0.0, 2.0) == 0.0  # half-open
    assert expectation(m, lambda h: h, 0.0, 2.0) == 2.0  # closed


def test_tabulated_validates_mass():
    with pytest.raises(ValueError):
        FadingModel.tabulated(0.5, [0.2, 0.2])
    m = FadingModel.tabulated(0.5, [0.25, 0.0, 0.75])
    h, p = m.support()
    assert list(h) == [0.0, 1.0]
    assert m.probability(0.0, 0.5) == 0.25
    with pytest.raises(ValueError):
        m.masses[0] = 1.0


def test_csv_round_trip(tmp_path):
    m = discretize(EXP, 0.5)
    path = tmp_path / "pmf.csv"
    m.to_csv(path)
    back = FadingModel.from_csv(path)
    assert back.step == m.step
    np.testing.assert_array_equal(back.masses, m.masses)


def test_expectation_rejects_bad_input():
    with pytest.raises(ValueError):
        expectation(EXP, lambda h: h, 2.0, 1.0)
    with pytest.raises(IntegrationError):
        expectation(EXP, lambda h: np.full_like(h, np.nan))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0 - 1e-9))
def test_quantile_inverts_cdf(u):
    assert EXP.cdf(quantile(EXP, u)) == pytest.approx(u, abs=1e-12)


@given(st.sampled_from([0.5, 0.1, 0.025]))
def test_discretize_conserves_mass(q):
    m = discretize(EXP, q)
    assert math.fsum(m.masses) == pytest.approx(1.0, abs=1e-12)
    assert np.all(m.masses >= 0)
    mean = math.fsum(np.arange(m.masses.size) * q * m.masses)
    assert mean == pytest.approx(6.0, rel=2 * q)
