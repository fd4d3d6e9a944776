"""UE-side estimation of the colliding UEs' total uplink signal power.

Three cell-free estimators plus the single-BS baseline. Every estimator is
floored at the UE's own power so a degenerate observation can only make the
UE back off, never falsely win.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioConfig

CF_ESTIMATORS = ("est1", "est2", "est3")
ESTIMATOR_KINDS = CF_ESTIMATORS + ("cellular",)
NEARBY_METHODS = ("fixed", "greedy")

# Tuned (nearby-set size, serving cap) pairs per collision size, N = 8.
BEST_PAIRS = {
    "est1": {1: (6, 6), 2: (7, 4), 3: (5, 4), 4: (5, 5), 5: (7, 7),
             6: (5, 9), 7: (7, 10), 8: (6, 10), 9: (7, 11), 10: (6, 12)},
    "est2": {1: (6, 9), 2: (7, 7), 3: (7, 7), 4: (6, 7), 5: (6, 7),
             6: (7, 8), 7: (7, 9), 8: (7, 10), 9: (7, 12), 10: (7, 11)},
    "est3": {1: (1, 1), 2: (7, 3), 3: (7, 4), 4: (7, 7), 5: (7, 8),
             6: (7, 10), 7: (6, 11), 8: (7, 10), 9: (6, 11), 10: (7, 12)},
}


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator a UE runs and how it sizes its nearby set."""

    kind: str = "est2"
    nearby_method: str = "fixed"
    delta: float | None = None  # compensation factor; est3 only, config default if None

    def __post_init__(self):
        if self.kind not in ESTIMATOR_KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.nearby_method not in NEARBY_METHODS:
            raise ValueError(f"unknown nearby method {self.nearby_method!r}")
        if self.kind == "est3" and self.delta is not None and self.delta < 1.0:
            raise ValueError("delta must be >= 1")


@dataclass
class UEKnowledge:
    """What a single UE knows when it runs its estimator.

    ``beta_nearby`` holds the gains toward the nearby APs, strongest first;
    ``re_z`` is the real part of the correlated downlink observation.
    """

    gamma: float
    beta_nearby: np.ndarray
    re_z: float


def knowledge_for(beta_nearby: np.ndarray, re_z: float, config: ScenarioConfig) -> UEKnowledge:
    beta_nearby = np.asarray(beta_nearby, dtype=float)
    gamma = config.ul_power_mw * config.num_pilots * beta_nearby.sum()
    return UEKnowledge(gamma=gamma, beta_nearby=beta_nearby, re_z=float(re_z))


def eps_z(n_antennas: int) -> float:
    """Clamp floor for near-zero observations before division."""
    return 1e-12 * np.sqrt(n_antennas)


def _cte(beta: np.ndarray, config: ScenarioConfig, dl_power_mw: float | None = None) -> np.ndarray:
    q = config.dl_power_per_ap_mw if dl_power_mw is None else dl_power_mw
    return np.sqrt(q * config.ul_power_mw) * config.num_pilots * beta


def estimate_1(knowledge: UEKnowledge, config: ScenarioConfig) -> float:
    """Equal-power-per-AP inversion of the downlink observation."""
    n = config.antennas_per_ap
    rez = max(knowledge.re_z, eps_z(n))
    raw = n * (_cte(knowledge.beta_nearby, config).sum() / rez) ** 2 - config.noise_mw
    return max(raw, knowledge.gamma)


def estimate_2_per_ap(beta: np.ndarray, re_z: float, config: ScenarioConfig,
                      dl_power_mw: float | None = None,
                      n_antennas: int | None = None) -> np.ndarray:
    """Closed-form per-AP power split minimizing the total under the
    observation constraint; the sum over APs is the estimate."""
    n = config.antennas_per_ap if n_antennas is None else n_antennas
    rez = max(re_z, eps_z(n))
    cte23 = _cte(np.asarray(beta, dtype=float), config, dl_power_mw) ** (2.0 / 3.0)
    factor = n * (cte23.sum() / rez) ** 2
    return factor * cte23 - config.noise_mw


def estimate_2(knowledge: UEKnowledge, config: ScenarioConfig) -> float:
    raw = estimate_2_per_ap(knowledge.beta_nearby, knowledge.re_z, config).sum()
    return max(raw, knowledge.gamma)


def cpu_alpha_hat(activity: np.ndarray, noise_mw: float) -> np.ndarray:
    """CPU-side per-pilot aggregate of above-noise activity, shape (T,)."""
    return np.maximum(activity - noise_mw, 0.0).sum(axis=1)


def preprocess_est3(re_z: float, delta: float, config: ScenarioConfig) -> float:
    """Compensated, noise-offset rescaling of the observation."""
    sigma = np.sqrt(config.noise_mw)
    return delta * (re_z - sigma) / np.sqrt(config.antennas_per_ap)


def estimate_3(knowledge: UEKnowledge, config: ScenarioConfig,
               delta: float | None = None) -> float:
    """Inversion tailored to the normalized (power-equalized) precoding."""
    if delta is None:
        delta = config.compensation_factor
    pre = max(preprocess_est3(knowledge.re_z, delta, config), eps_z(config.antennas_per_ap))
    raw = (_cte(knowledge.beta_nearby, config).sum() / pre) ** 2
    return max(raw, knowledge.gamma)


def estimate_cellular(beta_k: float, re_z: float, config: ScenarioConfig) -> float:
    """Single-BS baseline estimate from the scalar gain toward the BS."""
    m = config.bs_antennas
    q = config.bs_dl_power_mw
    p = config.ul_power_mw
    tau = config.num_pilots
    rez = max(re_z, eps_z(m))
    raw = m * q * p * tau ** 2 * beta_k ** 2 / rez ** 2 - config.noise_mw
    return max(raw, p * tau * beta_k)


def estimate(kind: str, knowledge: UEKnowledge, config: ScenarioConfig,
             delta: float | None = None) -> float:
    if kind == "est1":
        return estimate_1(knowledge, config)
    if kind == "est2":
        return estimate_2(knowledge, config)
    if kind == "est3":
        return estimate_3(knowledge, config, delta)
    raise ValueError(f"unknown estimator kind {kind!r}")


def greedy_flexible_decide(knowledge: UEKnowledge, spec: EstimatorSpec,
                           config: ScenarioConfig) -> bool:
    """Sweep nearby-set sizes from the full natural set down to 1 and
    retransmit if any size wins the contention rule.

    Both the estimate and the UE's own-power reference shrink with the set,
    keeping the two sides of the rule consistent at every size.
    """
    beta = knowledge.beta_nearby
    p_tau = config.ul_power_mw * config.num_pilots
    for size in range(beta.size, 0, -1):
        sub = beta[:size]
        gamma_s = p_tau * sub.sum()
        sub_knowledge = UEKnowledge(gamma=gamma_s, beta_nearby=sub, re_z=knowledge.re_z)
        alpha_hat = estimate(spec.kind, sub_knowledge, config, spec.delta)
        if gamma_s > alpha_hat / 2.0:
            return True
    return False
