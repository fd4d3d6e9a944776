"""Scenario configuration, unit conversion, topology and nearby-AP sets.

All internal computation is done in linear scale (mW, meters); dB/dBm only
appear at the configuration and reporting boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

# Distances are clamped from below so a UE dropped exactly on top of an AP
# does not produce an infinite channel gain.
MIN_DISTANCE_M = 1e-9


def db_to_linear(value_db):
    """Convert dB to linear scale (dBm inputs give mW)."""
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0) if isinstance(value_db, np.ndarray) else 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    """Inverse of :func:`db_to_linear`."""
    return 10.0 * (np.log10(value) if isinstance(value, np.ndarray) else math.log10(value))


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical and protocol constants plus experiment controls.

    Power fields ending in ``_db``/``_dbm`` are in log scale; ``_mw`` fields
    are linear milliwatts. Defaults correspond to the reference 400 m square
    with an 8x8 AP grid.
    """

    square_length_m: float = 400.0
    power_constant_db: float = -30.5
    pathloss_exponent: float = 3.67
    noise_power_dbm: float = -94.0
    num_pilots: int = 5
    num_aps: int = 64
    antennas_per_ap: int = 8
    dl_power_per_ap_mw: float = 200.0 / 64.0
    ul_power_mw: float = 100.0
    compensation_factor: float = 8.0
    num_inactive_ues: int = 5000
    access_probability: float = 0.001
    bs_antennas: int = 64
    bs_dl_power_mw: float = 200.0
    max_attempts: int = 10
    reattempt_probability: float = 0.5
    iota: float = 1.0
    l_max: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_pilots < 1:
            raise ValueError("num_pilots must be >= 1")
        if self.num_aps < 1:
            raise ValueError("num_aps must be >= 1")
        if self.antennas_per_ap < 1:
            raise ValueError("antennas_per_ap must be >= 1")
        if not 1 <= self.l_max <= self.num_aps:
            raise ValueError("l_max must lie in [1, num_aps]")
        if self.iota < 1.0:
            raise ValueError("iota must be >= 1")
        if not 0.0 <= self.access_probability <= 1.0:
            raise ValueError("access_probability must lie in [0, 1]")
        if not 0.0 <= self.reattempt_probability <= 1.0:
            raise ValueError("reattempt_probability must lie in [0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.noise_mw <= 0.0 or self.omega_lin <= 0.0:
            raise ValueError("linear powers derived from dB fields must be positive")

    @property
    def noise_mw(self) -> float:
        return db_to_linear(self.noise_power_dbm)

    @property
    def omega_lin(self) -> float:
        return db_to_linear(self.power_constant_db)


_INT_FIELDS = {
    "num_pilots", "num_aps", "antennas_per_ap", "num_inactive_ues",
    "bs_antennas", "max_attempts", "l_max", "rng_seed",
}


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Read a flat ``key = value`` config file; overrides take precedence."""
    values: dict = {}
    known = {f.name for f in fields(ScenarioConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val.strip()
    if overrides:
        values.update(overrides)
    typed = {}
    for key, val in values.items():
        if isinstance(val, str):
            typed[key] = int(val) if key in _INT_FIELDS else float(val)
        else:
            typed[key] = val
    return ScenarioConfig(**typed)


@dataclass
class Topology:
    """AP grid, UE drop and the derived distance / channel-gain tables.

    ``beta`` and ``distances`` are indexed ``[ue, ap]``.
    """

    ap_positions: np.ndarray
    ue_positions: np.ndarray
    distances: np.ndarray
    beta: np.ndarray


def ap_grid(num_aps: int, square_length_m: float) -> np.ndarray:
    """Centered uniform sqrt(L) x sqrt(L) grid; rejects non-square L."""
    side = math.isqrt(num_aps)
    if side * side != num_aps:
        raise ValueError(f"num_aps={num_aps} is not a perfect square; grid placement undefined")
    pitch = square_length_m / side
    coords = pitch / 2.0 + pitch * np.arange(side)
    xx, yy = np.meshgrid(coords, coords, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()])


def pathloss_beta(distances: np.ndarray, config: ScenarioConfig) -> np.ndarray:
    """Average channel gain Omega * d^(-zeta) in linear scale."""
    d = np.maximum(distances, MIN_DISTANCE_M)
    return config.omega_lin * d ** (-config.pathloss_exponent)


def build_topology(config: ScenarioConfig, rng: np.random.Generator,
                   num_ues: int | None = None,
                   ue_positions: np.ndarray | None = None) -> Topology:
    """Place the AP grid and drop UEs i.i.d. uniform on the square."""
    aps = ap_grid(config.num_aps, config.square_length_m)
    if ue_positions is None:
        if num_ues is None:
            num_ues = config.num_inactive_ues
        if num_ues < 1:
            raise ValueError("need at least one UE")
        ue_positions = rng.uniform(0.0, config.square_length_m, size=(num_ues, 2))
    else:
        ue_positions = np.asarray(ue_positions, dtype=float)
    diff = ue_positions[:, None, :] - aps[None, :, :]
    distances = np.sqrt((diff ** 2).sum(axis=2))
    return Topology(
        ap_positions=aps,
        ue_positions=ue_positions,
        distances=distances,
        beta=pathloss_beta(distances, config),
    )


def bs_topology(config: ScenarioConfig, ue_positions: np.ndarray) -> Topology:
    """Single-BS view of the same UE drop: one 'AP' at the square center."""
    center = np.array([[config.square_length_m / 2.0, config.square_length_m / 2.0]])
    diff = np.asarray(ue_positions, dtype=float)[:, None, :] - center[None, :, :]
    distances = np.sqrt((diff ** 2).sum(axis=2))
    return Topology(
        ap_positions=center,
        ue_positions=np.asarray(ue_positions, dtype=float),
        distances=distances,
        beta=pathloss_beta(distances, config),
    )


def limit_distance(config: ScenarioConfig, iota: float | None = None) -> float:
    """Radius of the influence region around a UE, in meters."""
    if iota is None:
        iota = config.iota
    base = (1.0 / iota) * config.omega_lin * config.dl_power_per_ap_mw / config.noise_mw
    return base ** (1.0 / config.pathloss_exponent)


@dataclass
class NearbySet:
    """APs a UE can hear above the noise floor, strongest first."""

    ue_index: int
    ap_indices: np.ndarray
    is_natural: bool


def _order_desc(beta_row: np.ndarray) -> np.ndarray:
    # stable sort on the negated gains: ties broken by lower AP index
    return np.argsort(-beta_row, kind="stable")


def nearby_set(topology: Topology, ue: int, config: ScenarioConfig,
               iota: float | None = None) -> NearbySet:
    """APs with received DL power above iota * noise; never empty.

    Falls back to the single strongest AP when the threshold excludes all,
    so a UE always knows at least one AP.
    """
    if iota is None:
        iota = config.iota
    beta_row = topology.beta[ue]
    order = _order_desc(beta_row)
    above = config.dl_power_per_ap_mw * beta_row[order] > iota * config.noise_mw
    members = order[above]
    if members.size == 0:
        members = order[:1]
    return NearbySet(ue_index=ue, ap_indices=members, is_natural=(iota == 1.0))


def nearby_set_topn(topology: Topology, ue: int, size: int) -> NearbySet:
    """Fixed-size variant: the ``size`` strongest APs regardless of threshold."""
    order = _order_desc(topology.beta[ue])
    return NearbySet(ue_index=ue, ap_indices=order[:size], is_natural=False)


def natural_sets(topology: Topology, config: ScenarioConfig,
                 ue_indices) -> list[np.ndarray]:
    """Natural nearby sets (iota = 1) for several UEs at once."""
    return [nearby_set(topology, int(k), config, iota=1.0).ap_indices for k in ue_indices]
