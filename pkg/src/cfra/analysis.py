"""Closed-form spatial-separability analysis on the square region.

Distance distribution between two uniform points, expected overlap of two
influence disks, and the probability that a nearby AP serves a UE
exclusively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .scenario import ScenarioConfig, limit_distance

_SQRT2 = math.sqrt(2.0)
_EDGE_TOL = 1e-9


def _g(z: float, d: float, span: float) -> float:
    """Piecewise antiderivative used by the distance CDF."""
    root = math.sqrt(max(d * d - z * z, 0.0))
    term1 = (span / 3.0) * root * (z * (3.0 * span - 2.0 * z) + 2.0 * d * d)
    term2 = span * span * d * d * math.atan2(z, root)
    return term1 + term2 - span * d * d * z + span * z ** 3 / 3.0 \
        + span * span * z * z / 2.0 - z ** 4 / 4.0


def distance_cdf(d: float, side: float) -> float:
    """Model CDF of the distance between two uniform points on the square.

    The closed form is normalized over the full difference-coordinate range
    2*side (each coordinate difference spans [-side, side]), so every
    argument in [0, sqrt(2)*side] falls in the first branch.
    """
    if d < -_EDGE_TOL or d > _SQRT2 * side + _EDGE_TOL:
        raise ValueError(f"distance {d} outside [0, sqrt(2)*{side}]")
    d = min(max(d, 0.0), _SQRT2 * side)
    span = 2.0 * side
    if d < span:
        val = (2.0 / span ** 4) * (_g(d, d, span) - _g(0.0, d, span))
    else:  # unreachable for d <= sqrt(2)*side; kept for the full piecewise form
        val = (2.0 / span ** 4) * (2.0 * _g(span, d, span)
                                   - _g(math.sqrt(d * d - span * span), d, span)
                                   - _g(0.0, d, span))
    return min(max(val, 0.0), 1.0)


def distance_pdf(d: float, side: float) -> float:
    """Density matching :func:`distance_cdf`, short-range branch (d <= side)."""
    if d < -_EDGE_TOL or d > side + _EDGE_TOL:
        raise ValueError(f"distance {d} outside the short-range branch [0, {side}]")
    d = min(max(d, 0.0), side)
    span = 2.0 * side
    return (2.0 / span ** 4) * ((1.0 + math.pi) * span ** 2 * d
                                - 4.0 * span * d ** 2 - d ** 3)


def overlap_area(d: float, radius: float) -> float:
    """Lens area of two equal circles with centers ``d`` apart; 0 beyond 2r."""
    if d >= 2.0 * radius:
        return 0.0
    h1 = 2.0 * radius ** 2 * math.acos(d / (2.0 * radius))
    h2 = (d / 2.0) * math.sqrt(4.0 * radius ** 2 - d * d)
    return h1 - h2


def expected_overlap_area(d_lim: float, side: float) -> float:
    """Unconditional expectation of the overlap of two influence disks.

    Valid in the short-range regime 2*d_lim <= side, where only the first
    branch of the distance density contributes.
    """
    if d_lim <= 0.0:
        return 0.0
    if 2.0 * d_lim > side:
        raise ValueError("expected_overlap_area requires 2*d_lim <= side")

    def h1(d):
        return 2.0 * d_lim ** 2 * math.acos(min(d / (2.0 * d_lim), 1.0)) * distance_pdf(d, side)

    def h2(d):
        return (d / 2.0) * math.sqrt(max(4.0 * d_lim ** 2 - d * d, 0.0)) * distance_pdf(d, side)

    upper = 2.0 * d_lim
    e_h1, _ = quad(h1, 0.0, upper, epsabs=1e-10, limit=200)
    e_h2, _ = quad(h2, 0.0, upper, epsabs=1e-10, limit=200)
    return e_h1 - e_h2


@dataclass
class SeparabilityPrediction:
    """Closed-form separability figures for one scenario point."""

    d_lim: float
    area_influence: float
    expected_overlap: float
    neighbor_prob: float
    avg_collision_size: float
    dominant_area: float
    psi: float
    exclusive_aps: float


def separability_prediction(config: ScenarioConfig,
                            num_inactive_ues: int | None = None) -> SeparabilityPrediction:
    """Probability of an exclusively-serving nearby AP and the area behind it."""
    side = config.square_length_m
    if num_inactive_ues is None:
        num_inactive_ues = config.num_inactive_ues
    d_lim = limit_distance(config, iota=1.0)
    area = math.pi * d_lim ** 2
    neighbor_prob = distance_cdf(2.0 * d_lim, side)
    avg_collision = num_inactive_ues * config.access_probability / config.num_pilots
    overlap = expected_overlap_area(d_lim, side)
    psi = 1.0 - neighbor_prob * max(avg_collision - 1.0, 0.0) * overlap / area
    psi = min(max(psi, 0.0), 1.0)
    dominant = psi * area
    density = config.num_aps / side ** 2
    return SeparabilityPrediction(
        d_lim=d_lim, area_influence=area, expected_overlap=overlap,
        neighbor_prob=neighbor_prob, avg_collision_size=avg_collision,
        dominant_area=dominant, psi=psi, exclusive_aps=density * dominant,
    )
