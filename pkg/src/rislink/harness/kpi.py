"""Reference KPI targets for industrial machine-type communication (5G vs 6G)."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType


@dataclass(frozen=True)
class KpiTarget:
    name: str
    target_5g: str
    target_6g: str
    failure_probability_6g: float | None = None


_TARGETS = (
    KpiTarget("per_link_reliability", "1 - 1e-5", "1 - 1e-9", 1e-9),
    KpiTarget("e2e_reliability", "not considered", "1 - 1e-6", 1e-6),
    KpiTarget("per_link_latency", "1 ms", "0.1 ms"),
    KpiTarget("e2e_latency", "5 ms", "< 1 ms"),
    KpiTarget("connection_setup_time", "not considered", "< 1 ms"),
    KpiTarget("connection_density", "1 device/m^2", "up to 10 device/m^3"),
    KpiTarget("spectral_efficiency_dl", "~25 bpcu", "~40 bpcu"),
    KpiTarget("device_lifetime", "10 years", "40 years"),
    KpiTarget("energy_consumption", "low", "ultra-low"),
    KpiTarget("positioning_accuracy", "30 cm", "1 cm / 5 mm"),
    KpiTarget("jitter", "1 us", "< 0.1 us"),
    KpiTarget("e2e_optimization", "not considered", "relevant"),
    KpiTarget("dependability", "not considered", "relevant"),
)

KPI_TARGETS = MappingProxyType({t.name: t for t in _TARGETS})


def reliability_annotations(error_target: float) -> dict:
    """Which 6G reliability classes a decoding-error target satisfies."""
    out = {}
    for name in ("per_link_reliability", "e2e_reliability"):
        t = KPI_TARGETS[name]
        out[name] = {
            "target_6g": t.target_6g,
            "met_by_error_target": bool(error_target <= t.failure_probability_6g),
        }
    return out
