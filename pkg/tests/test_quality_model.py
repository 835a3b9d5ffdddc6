import math

import numpy as np
import pytest
from scipy import integrate, stats

from app.models import RegimeKind, SelectivityRegime, ValidationError
from app.services.quality_model import (
    TruncatedNormal,
    linear_quality_grid,
    qualities_from_uniforms,
    regime_distribution,
    regime_params,
    sample_qualities,
)
from app.utils.rng import make_generator

EDGE_UNIFORMS = np.array([0.0, 0.5, 1.0 - 2.0 ** -53])


@pytest.mark.parametrize(
    "kind, expected",
    [
        (RegimeKind.HIGH, (5.0, 1.0)),
        (RegimeKind.MEDIUM, (3.0, 1.0)),
        (RegimeKind.LOW, (1.0, 1.0)),
    ],
)
def test_regime_params(kind, expected):
    assert regime_params(SelectivityRegime(kind, 5)) == expected


def test_random_regime_has_no_center():
    mean, variance = regime_params(SelectivityRegime(RegimeKind.RANDOM, 5))
    assert mean is None and math.isinf(variance)


def test_tiny_variance_concentrates_on_center():
    regime = SelectivityRegime(RegimeKind.MEDIUM, 5)
    values = sample_qualities(regime, 1000, make_generator(3), variance=1e-8)
    assert np.allclose(values, 3.0, atol=1e-3)


def test_random_regime_mean():
    regime = SelectivityRegime(RegimeKind.RANDOM, 5)
    values = sample_qualities(regime, 1_000_000, make_generator(11))
    stderr = (4.0 / math.sqrt(12.0)) / 1000.0
    assert abs(values.mean() - 3.0) < 4 * stderr


def test_high_expected_value_matches_quadrature():
    dist = TruncatedNormal(mean=5.0, variance=1.0, lower=1.0, upper=5.0)
    numeric, _ = integrate.quad(lambda x: x * float(dist.pdf(x)), 1.0, 5.0)
    reference = stats.truncnorm(-4.0, 0.0, loc=5.0, scale=1.0).mean()
    assert dist.expected_value() == pytest.approx(numeric, rel=1e-9)
    assert dist.expected_value() == pytest.approx(reference, rel=1e-10)


@pytest.mark.parametrize("kind", [RegimeKind.HIGH, RegimeKind.MEDIUM, RegimeKind.LOW])
def test_sampler_matches_truncated_normal(kind):
    regime = SelectivityRegime(kind, 5)
    mean, _ = regime_params(regime)
    values = sample_qualities(regime, 1_000_000, make_generator(21))
    reference = stats.truncnorm(1.0 - mean, 5.0 - mean, loc=mean, scale=1.0)
    assert stats.kstest(values, reference.cdf).statistic < 0.005


@pytest.mark.parametrize("kind", list(RegimeKind))
def test_qualities_are_strictly_inside(kind):
    regime = SelectivityRegime(kind, 5)
    values = qualities_from_uniforms(regime, EDGE_UNIFORMS)
    assert (values > 1.0).all() and (values < 5.0).all()

    many = sample_qualities(regime, 100_000, make_generator(5))
    assert (many > 1.0).all() and (many < 5.0).all()


@pytest.mark.parametrize("kind", [RegimeKind.HIGH, RegimeKind.MEDIUM, RegimeKind.LOW, RegimeKind.RANDOM])
def test_regimes_follow_rating_ceiling(kind):
    regime = SelectivityRegime(kind, 7)
    values = sample_qualities(regime, 200_000, make_generator(17))
    assert (values > 1.0).all() and (values < 7.0).all()

    mean, _ = regime_params(regime)
    if mean is None:
        assert values.max() > 6.9
        return
    dist = regime_distribution(regime)
    assert dist.upper == 7.0
    reference = stats.truncnorm(1.0 - mean, 7.0 - mean, loc=mean, scale=1.0)
    assert stats.kstest(values, reference.cdf).statistic < 0.01


def test_cdf_at_bounds():
    dist = regime_distribution(SelectivityRegime(RegimeKind.LOW, 5))
    assert float(dist.cdf(1.0)) == 0.0
    assert float(dist.cdf(5.0)) == pytest.approx(1.0)


def test_linear_grid_examples():
    np.testing.assert_allclose(linear_quality_grid(3, 2), [1.75, 1.5, 1.25])
    np.testing.assert_allclose(linear_quality_grid(1, 5), [3.0])
    grid = linear_quality_grid(200, 5)
    assert grid[0] - grid[-1] == pytest.approx(199 * 4 / 201)
    assert (np.diff(grid) < 0).all()


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        TruncatedNormal(mean=3.0, variance=0.0, upper=5.0)
    with pytest.raises(ValidationError):
        sample_qualities(SelectivityRegime(RegimeKind.HIGH, 5), 0, make_generator(1))
    with pytest.raises(ValidationError):
        linear_quality_grid(0, 5)
