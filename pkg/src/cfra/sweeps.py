"""Experiment sweep orchestration.

A :class:`SweepDescriptor` names one of the four figure classes, the varied
axis and the trial budget; :func:`run_sweep` executes the points in
deterministic order and serializes a CSV of :class:`~cfra.metrics.MetricsReport`
rows plus a JSON run manifest.
"""

from __future__ import annotations

import json
import platform
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import separability_prediction
from .bench import run_estimator_bench
from .contention import run_access_campaign
from .estimators import BEST_PAIRS, CF_ESTIMATORS, NEARBY_METHODS, EstimatorSpec
from .metrics import MetricsReport, iqr, tcp, write_reports
from .scenario import ScenarioConfig

FIGURE_CLASSES = ("estimator-bench", "anaa-sweep", "ee-sweep", "separability")

_AXES = {
    "estimator-bench": "collision_size",
    "anaa-sweep": "num_inactive_ues",
    "ee-sweep": "num_inactive_ues",
    "separability": "num_inactive_ues",
}


@dataclass(frozen=True)
class SweepDescriptor:
    """What to sweep: figure class, axis values, protocols/estimators, budget."""

    figure_class: str
    values: tuple = ()
    axis: str = ""
    trials: int = 100
    seed: int = 0
    protocols: tuple = ("bcf", "cf-sucre", "ce-sucre")
    estimators: tuple = ("est2",)
    nearby_method: str = "fixed"

    def __post_init__(self):
        if self.figure_class not in FIGURE_CLASSES:
            raise ValueError(
                f"figure_class must be one of {FIGURE_CLASSES}, got {self.figure_class!r}")
        expected = _AXES[self.figure_class]
        axis = self.axis or expected
        if axis != expected:
            raise ValueError(
                f"figure_class {self.figure_class!r} sweeps {expected!r}, got axis {self.axis!r}")
        object.__setattr__(self, "axis", axis)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for proto in self.protocols:
            if proto not in ("bcf", "cf-sucre", "ce-sucre"):
                raise ValueError(f"unknown protocol {proto!r}")
        for est in self.estimators:
            if est not in CF_ESTIMATORS:
                raise ValueError(f"unknown estimator {est!r}")
        if self.nearby_method not in NEARBY_METHODS:
            raise ValueError(f"unknown nearby_method {self.nearby_method!r}")


def _bench_point(desc: SweepDescriptor, size: int, kind: str,
                 config: ScenarioConfig, rng) -> MetricsReport:
    if kind == "cellular":
        nearby_size, l_max = 1, 1
    else:
        nearby_size, l_max = BEST_PAIRS[kind][size]
    result = run_estimator_bench(
        kind, size, nearby_size, l_max, config, rng,
        num_setups=desc.trials, num_realizations=100)
    return MetricsReport(
        sweep_axis=desc.axis, sweep_value=float(size),
        protocol="ce-sucre" if kind == "cellular" else "cf-sucre",
        estimator=kind, nearby_method=desc.nearby_method,
        nmse_median=float(np.median(result.nmse)), nmse_iqr=iqr(result.nmse),
        neb_median=float(np.median(result.neb)), neb_iqr=iqr(result.neb),
        nmd_mean=float(np.nanmean(result.nmd)),
        trials=desc.trials, seed=desc.seed)


def _campaign_point(desc: SweepDescriptor, num_ues: int, protocol: str,
                    kind: str, config: ScenarioConfig, rng,
                    with_tcp: bool) -> MetricsReport:
    point_config = replace(config, num_inactive_ues=num_ues)
    spec = EstimatorSpec(kind=kind, nearby_method=desc.nearby_method) \
        if protocol == "cf-sucre" else \
        EstimatorSpec(kind="cellular" if protocol == "ce-sucre" else kind)
    anaa_vals, tcp_vals = [], []
    for _ in range(desc.trials):
        result = run_access_campaign(protocol, spec, point_config, rng)
        if not np.isfinite(result.anaa):
            continue
        anaa_vals.append(result.anaa)
        if with_tcp:
            q_eff = result.q_eff_mw if np.isfinite(result.q_eff_mw) else None
            tcp_vals.append(tcp(protocol, result.anaa, point_config,
                               result.tau_bar_pl if protocol != "ce-sucre" else result.tau_bar,
                               result.l_bar, q_eff_mw=q_eff))
    return MetricsReport(
        sweep_axis=desc.axis, sweep_value=float(num_ues),
        protocol=protocol, estimator=spec.kind, nearby_method=spec.nearby_method,
        anaa=float(np.mean(anaa_vals)) if anaa_vals else float("nan"),
        tcp_mw_symbols=float(np.mean(tcp_vals)) if tcp_vals else float("nan"),
        trials=desc.trials, seed=desc.seed)


def _separability_point(desc: SweepDescriptor, num_ues: int,
                        config: ScenarioConfig) -> MetricsReport:
    pred = separability_prediction(config, num_inactive_ues=num_ues)
    # closed-form point: psi and the exclusive-AP count reuse the two
    # numeric columns under the "analysis" protocol tag
    return MetricsReport(
        sweep_axis=desc.axis, sweep_value=float(num_ues),
        protocol="analysis", estimator="psi", nearby_method="",
        anaa=pred.psi, tcp_mw_symbols=pred.exclusive_aps,
        trials=0, seed=desc.seed)


def run_sweep(desc: SweepDescriptor, config: ScenarioConfig,
              out_dir=None) -> list[MetricsReport]:
    """Execute every sweep point in order; optionally write CSV + manifest."""
    rng = np.random.default_rng(desc.seed)
    reports: list[MetricsReport] = []
    for value in desc.values:
        value = int(value)
        if desc.figure_class == "estimator-bench":
            kinds = list(desc.estimators)
            if "ce-sucre" in desc.protocols:
                kinds.append("cellular")
            for kind in kinds:
                reports.append(_bench_point(desc, value, kind, config, rng))
        elif desc.figure_class == "separability":
            reports.append(_separability_point(desc, value, config))
        else:
            with_tcp = desc.figure_class == "ee-sweep"
            for protocol in desc.protocols:
                if protocol == "cf-sucre":
                    for kind in desc.estimators:
                        reports.append(_campaign_point(
                            desc, value, protocol, kind, config, rng, with_tcp))
                else:
                    reports.append(_campaign_point(
                        desc, value, protocol, desc.estimators[0], config, rng, with_tcp))
    if out_dir is not None:
        write_outputs(desc, config, reports, out_dir)
    return reports


def write_outputs(desc: SweepDescriptor, config: ScenarioConfig,
                  reports, out_dir) -> tuple[Path, Path]:
    """Serialize the CSV of reports and the JSON run manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{desc.figure_class}.csv"
    manifest_path = out_dir / f"{desc.figure_class}.manifest.json"
    write_reports(reports, csv_path)
    manifest = {
        "provenance": f"cfra {__version__} python {platform.python_version()} "
                      f"numpy {np.__version__}",
        "seed": desc.seed,
        "descriptor": {**asdict(desc), "values": list(desc.values),
                       "protocols": list(desc.protocols),
                       "estimators": list(desc.estimators)},
        "config": asdict(config),
        "rows": len(reports),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return csv_path, manifest_path
