"""Closed-form distance law, overlap integrals and separability figures."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from cfra.analysis import (distance_cdf, distance_pdf, expected_overlap_area,
                           overlap_area, separability_prediction)
from cfra.scenario import ScenarioConfig, limit_distance

SIDE = 400.0


def test_cdf_endpoints_and_reference_value():
    assert distance_cdf(0.0, SIDE) == 0.0
    assert distance_cdf(math.sqrt(2.0) * SIDE, SIDE) == pytest.approx(1.0, abs=1e-9)
    cfg = ScenarioConfig()
    d_lim = limit_distance(cfg, iota=1.0)
    assert distance_cdf(2.0 * d_lim, SIDE) == pytest.approx(0.122, abs=0.002)
    # probability that two UEs both pick one pilot and are mutual neighbors
    assert distance_cdf(2.0 * d_lim, SIDE) / cfg.num_pilots == pytest.approx(
        0.024, abs=0.001)


def test_cdf_monotone():
    grid = np.linspace(0.0, math.sqrt(2.0) * SIDE, 400)
    vals = [distance_cdf(float(d), SIDE) for d in grid]
    assert (np.diff(vals) >= -1e-12).all()


def test_cdf_domain_rejection():
    with pytest.raises(ValueError):
        distance_cdf(-1.0, SIDE)
    with pytest.raises(ValueError):
        distance_cdf(math.sqrt(2.0) * SIDE + 1.0, SIDE)
    with pytest.raises(ValueError):
        distance_pdf(SIDE + 1.0, SIDE)


def test_pdf_integrates_to_cdf():
    for d in (30.0, 146.6, 250.0, SIDE):
        integral, _ = quad(distance_pdf, 0.0, d, args=(SIDE,), epsabs=1e-12, limit=200)
        assert abs(integral - distance_cdf(d, SIDE)) < 1e-6


def test_overlap_area_lens():
    r = 10.0
    assert overlap_area(0.0, r) == pytest.approx(math.pi * r * r)
    assert overlap_area(2.0 * r, r) == 0.0
    assert overlap_area(25.0, r) == 0.0
    # hand value at d = r: 2 r^2 acos(1/2) - (r/2) sqrt(3) r
    expect = 2.0 * r * r * math.acos(0.5) - (r / 2.0) * math.sqrt(3.0) * r
    assert overlap_area(r, r) == pytest.approx(expect)


def test_expected_overlap_bounds():
    cfg = ScenarioConfig()
    d_lim = limit_distance(cfg, iota=1.0)
    avg = expected_overlap_area(d_lim, SIDE)
    assert 0.0 < avg < math.pi * d_lim ** 2 * distance_cdf(2.0 * d_lim, SIDE)
    assert expected_overlap_area(0.0, SIDE) == 0.0
    with pytest.raises(ValueError):
        expected_overlap_area(SIDE, SIDE)  # needs 2*d_lim <= side


def test_separability_prediction_reference_point():
    cfg = ScenarioConfig()
    pred = separability_prediction(cfg, num_inactive_ues=1000)
    # <= one expected collider: no contention, every nearby AP exclusive
    assert pred.avg_collision_size <= 1.0
    assert pred.psi == 1.0
    assert pred.exclusive_aps == pytest.approx(6.75, abs=0.05)
    assert pred.dominant_area == pytest.approx(math.pi * pred.d_lim ** 2)


def test_separability_psi_nonincreasing():
    cfg = ScenarioConfig()
    last = 2.0
    for num in (1000, 2000, 5000, 10000, 50000):
        pred = separability_prediction(cfg, num_inactive_ues=num)
        assert pred.psi <= last + 1e-12
        assert 0.0 <= pred.psi <= 1.0
        last = pred.psi
