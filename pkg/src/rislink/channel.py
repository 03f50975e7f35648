"""Scenario geometry, log-distance path loss and Rayleigh channel sampling.

Array layout used throughout the package (``K`` actuators, ``N`` RIS
elements, ``M`` BS antennas)::

    direct           (K, M)   BS -> actuator
    bs_to_ris        (N, M)   BS -> RIS
    ris_to_actuator  (K, N)   RIS -> actuator, row k is g_k

Batched samplers prepend a trial axis to each of these.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from rislink.numerics import ParameterError, RngStream, sample_circular_gaussian


@dataclass(frozen=True)
class PathLossModel:
    intercept_db: float = 34.53
    slope_db_per_decade: float = 38.0

    def __post_init__(self):
        if self.slope_db_per_decade < 0:
            raise ParameterError("path-loss slope must be non-negative")


@dataclass(frozen=True)
class LinkBudget:
    """Transmit and noise power (dB, common reference) plus a direct-path offset.

    Only differences matter: ``snr_offset_db = tx_power_db - noise_power_db``
    maps a channel power gain to an SNR.
    """

    tx_power_db: float = 0.0
    noise_power_db: float = 0.0
    direct_path_offset_db: float = 0.0

    def __post_init__(self):
        for name in ("tx_power_db", "noise_power_db", "direct_path_offset_db"):
            if not np.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    @property
    def snr_offset_db(self) -> float:
        return self.tx_power_db - self.noise_power_db

    @property
    def snr_scale(self) -> float:
        return 10.0 ** (self.snr_offset_db / 10.0)


@dataclass(frozen=True)
class NodeLayout:
    bs_position: tuple
    ris_position: tuple
    actuator_positions: tuple
    bs_antennas: int = 1
    ris_elements: int = 512

    def __post_init__(self):
        object.__setattr__(self, "bs_position", tuple(float(v) for v in self.bs_position))
        object.__setattr__(self, "ris_position", tuple(float(v) for v in self.ris_position))
        object.__setattr__(
            self,
            "actuator_positions",
            tuple(tuple(float(v) for v in p) for p in self.actuator_positions),
        )
        if self.ris_elements < 1 or self.bs_antennas < 1:
            raise ParameterError("need at least one RIS element and one BS antenna")
        if not self.actuator_positions:
            raise ParameterError("layout has no actuators")
        points = [self.bs_position, self.ris_position, *self.actuator_positions]
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if _distance(points[i], points[j]) <= 0:
                    raise ParameterError(f"nodes {i} and {j} coincide")

    @property
    def n_actuators(self) -> int:
        return len(self.actuator_positions)

    def bs_ris_distance(self) -> float:
        return _distance(self.bs_position, self.ris_position)

    def ris_actuator_distances(self) -> np.ndarray:
        return np.array([_distance(self.ris_position, p) for p in self.actuator_positions])

    def direct_distances(self) -> np.ndarray:
        return np.array([_distance(self.bs_position, p) for p in self.actuator_positions])


def _distance(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def single_link_layout(n_elements=512) -> NodeLayout:
    """Single-antenna BS at the origin, RIS at (10, 10), actuator at (100, 0)."""
    return NodeLayout((0.0, 0.0), (10.0, 10.0), ((100.0, 0.0),), 1, n_elements)


def factory_layout(n_elements=64, bs_antennas=4) -> NodeLayout:
    """Indoor-factory layout with four actuators served by a multi-antenna BS."""
    actuators = ((135.0, 105.0), (105.0, 135.0), (120.0, 90.0), (90.0, 120.0))
    return NodeLayout((75.0, 75.0), (150.0, 150.0), actuators, bs_antennas, n_elements)


def path_loss_db(model: PathLossModel, d) -> np.ndarray | float:
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ParameterError("distance must be positive")
    out = model.intercept_db + model.slope_db_per_decade * np.log10(d)
    return float(out) if out.ndim == 0 else out


def _amplitude(model, d):
    return 10.0 ** (-np.asarray(path_loss_db(model, d)) / 20.0)


@dataclass(frozen=True)
class ChannelRealization:
    direct: np.ndarray = field(repr=False)
    bs_to_ris: np.ndarray = field(repr=False)
    ris_to_actuator: np.ndarray = field(repr=False)

    def __post_init__(self):
        k, m = self.direct.shape[-2:]
        n, m2 = self.bs_to_ris.shape[-2:]
        k2, n2 = self.ris_to_actuator.shape[-2:]
        if m != m2 or k != k2 or n != n2:
            raise ParameterError(
                f"inconsistent channel shapes {self.direct.shape}, "
                f"{self.bs_to_ris.shape}, {self.ris_to_actuator.shape}"
            )

    @property
    def n_elements(self) -> int:
        return self.bs_to_ris.shape[-2]

    @property
    def n_antennas(self) -> int:
        return self.bs_to_ris.shape[-1]

    @property
    def n_actuators(self) -> int:
        return self.direct.shape[-2]


def sample_realization(layout: NodeLayout, model: PathLossModel, budget: LinkBudget, rng, trials=None):
    """Draw Rayleigh channels scaled by the segment path losses.

    With ``trials=None`` one :class:`ChannelRealization` is returned; otherwise
    every array carries a leading axis of length ``trials``.
    """
    if isinstance(rng, RngStream):
        rng = rng.generator()
    lead = () if trials is None else (int(trials),)
    k, n, m = layout.n_actuators, layout.ris_elements, layout.bs_antennas

    # Draw order is part of the determinism contract: direct, bs_to_ris, ris_to_actuator.
    direct = sample_circular_gaussian(rng, lead + (k, m))
    bs_to_ris = sample_circular_gaussian(rng, lead + (n, m))
    ris_to_act = sample_circular_gaussian(rng, lead + (k, n))

    direct_amp = _amplitude(model, layout.direct_distances())
    direct_amp = direct_amp * 10.0 ** (budget.direct_path_offset_db / 20.0)
    direct *= direct_amp[:, None]
    bs_to_ris *= _amplitude(model, layout.bs_ris_distance())
    ris_to_act *= _amplitude(model, layout.ris_actuator_distances())[:, None]
    return ChannelRealization(direct, bs_to_ris, ris_to_act)
